#!/usr/bin/env python3
# confkit - conformer ensemble generation and benchmarking
# SPDX-License-Identifier: Apache-2.0
"""Regenerates the committed molecule files under data/toy and tests/fixtures.

Requires RDKit. The library never depends on RDKit; this script only
produces starting geometries (with explicit hydrogens) and a few
hand-broken files for parser error tests.

    python3 tools/make_fixtures.py
"""

from pathlib import Path

from rdkit import Chem
from rdkit.Chem import AllChem

ROOT = Path(__file__).resolve().parent.parent
TOY = ROOT / "data" / "toy"
FIX = ROOT / "tests" / "fixtures"
BAD = FIX / "malformed"

TOY_SET = {
    "butane": "CCCC",
    "pentane": "CCCCC",
    "cyclohexane": "C1CCCCC1",
    "propanol": "CCCO",
    "diethyl_ether": "CCOCC",
    "methylcyclopentane": "CC1CCCC1",
}


def embed(smiles, name, n_conf=1, seed=7):
    mol = Chem.AddHs(Chem.MolFromSmiles(smiles))
    params = AllChem.ETKDGv3()
    params.randomSeed = seed
    ids = AllChem.EmbedMultipleConfs(mol, numConfs=n_conf, params=params)
    assert len(ids) == n_conf, name
    AllChem.MMFFOptimizeMoleculeConfs(mol)
    mol.SetProp("_Name", name)
    return mol


def sdf_text(mol):
    out = []
    for conf in mol.GetConformers():
        block = Chem.MolToMolBlock(mol, confId=conf.GetId(), kekulize=True)
        out.append(block + "$$$$\n")
    return "".join(out)


def xyz_text(mol, comment):
    frames = []
    for conf in mol.GetConformers():
        lines = [str(mol.GetNumAtoms()), comment]
        for atom in mol.GetAtoms():
            p = conf.GetAtomPosition(atom.GetIdx())
            lines.append(f"{atom.GetSymbol()} {p.x:.6f} {p.y:.6f} {p.z:.6f}")
        frames.append("\n".join(lines) + "\n")
    return "".join(frames)


def write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def main():
    for name, smi in TOY_SET.items():
        write(TOY / f"{name}.sdf", sdf_text(embed(smi, name)))

    write(FIX / "methane.sdf", sdf_text(embed("C", "methane")))
    write(FIX / "ethane_2conf.sdf", sdf_text(embed("CC", "ethane", n_conf=2)))
    write(FIX / "butane_3rec.sdf", sdf_text(embed("CCCC", "butane", n_conf=3)))
    write(FIX / "hexane.sdf", sdf_text(embed("CCCCCC", "hexane")))
    write(FIX / "benzene.sdf", sdf_text(embed("c1ccccc1", "benzene")))
    water = embed("O", "water", n_conf=2)
    write(FIX / "water_2frame.xyz", xyz_text(water, "water"))
    write(FIX / "water_trailing_blank.xyz", xyz_text(water, "water") + "\n\n\n")

    methane = sdf_text(embed("C", "methane")).splitlines(keepends=True)
    # Drop the last atom line but keep the counts line claiming 5 atoms.
    write(BAD / "counts_claims_5_atoms.sdf", "".join(methane[:8] + methane[9:]))
    # Bond referencing atom 9 in a 5-atom molecule.
    bad_bond = list(methane)
    bad_bond[9] = "  1  9  1  0\n"
    write(BAD / "bond_index_out_of_range.sdf", "".join(bad_bond))
    bad_coord = list(methane)
    bad_coord[4] = "    1.2x34" + bad_coord[4][10:]
    write(BAD / "nonnumeric_coordinate.sdf", "".join(bad_coord))
    v3000 = list(methane)
    v3000[3] = "  0  0  0     0  0            999 V3000\n"
    write(BAD / "v3000.sdf", "".join(v3000))
    garbage_counts = list(methane)
    garbage_counts[3] = "abcdef\n"
    write(BAD / "garbage_counts.sdf", "".join(garbage_counts))
    mixed = sdf_text(embed("CCCC", "butane")) + sdf_text(embed("CCCO", "butane"))
    write(BAD / "inconsistent_connectivity.sdf", mixed)
    write(BAD / "empty.sdf", "\n\n")

    w = xyz_text(water, "water").splitlines(keepends=True)
    frame2 = ["4\n", "water\n"] + w[7:10] + ["H 0.0 0.0 1.0\n"]
    write(BAD / "frame_atom_mismatch.xyz", "".join(w[:5] + frame2))
    nonnum = list(w)
    nonnum[3] = "H 0.1 abc 0.3\n"
    write(BAD / "nonnumeric_coordinate.xyz", "".join(nonnum))
    write(BAD / "truncated_frame.xyz", "".join(w[:4]))


if __name__ == "__main__":
    main()
