//
// confkit - conformer ensemble generation and benchmarking
// SPDX-License-Identifier: Apache-2.0
//

#include "confkit/molecule.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <utility>

#include "confkit/error.hpp"
#include "confkit/molio.hpp"

namespace confkit {
namespace {
  // Iterative Tarjan bridge search. A bond is a ring bond iff it is not a
  // bridge, i.e. its endpoints stay connected after removing it.
  std::vector<bool> find_ring_bonds(std::size_t n, const std::vector<Bond> &bonds,
                                    const std::vector<std::vector<int>> &adj) {
    std::vector<bool> ring(bonds.size(), true);
    std::vector<int> disc(n, -1), low(n, 0);
    int timer = 0;

    struct Frame {
      int atom;
      int parent_bond;
      std::size_t next;
    };

    for (std::size_t root = 0; root < n; ++root) {
      if (disc[root] >= 0)
        continue;

      std::vector<Frame> stack { { static_cast<int>(root), -1, 0 } };
      disc[root] = low[root] = timer++;
      while (!stack.empty()) {
        Frame &f = stack.back();
        const auto &nbrs = adj[f.atom];
        if (f.next < nbrs.size()) {
          int bond = nbrs[f.next++];
          if (bond == f.parent_bond)
            continue;
          int other = bonds[bond].i == f.atom ? bonds[bond].j : bonds[bond].i;
          if (disc[other] < 0) {
            disc[other] = low[other] = timer++;
            stack.push_back({ other, bond, 0 });
          } else {
            low[f.atom] = std::min(low[f.atom], disc[other]);
          }
          continue;
        }

        Frame done = f;
        stack.pop_back();
        if (stack.empty())
          continue;
        int parent = stack.back().atom;
        low[parent] = std::min(low[parent], low[done.atom]);
        if (low[done.atom] > disc[parent])
          ring[done.parent_bond] = false;
      }
    }
    return ring;
  }
}  // namespace

Molecule::Molecule(std::string id, std::vector<Atom> atoms, std::vector<Bond> bonds)
    : id_(std::move(id)), atoms_(std::move(atoms)), bonds_(std::move(bonds)) {
  const int n = static_cast<int>(atoms_.size());
  adj_.assign(atoms_.size(), { });

  std::vector<std::vector<int>> bond_adj(atoms_.size());
  for (std::size_t b = 0; b < bonds_.size(); ++b) {
    auto &bond = bonds_[b];
    if (bond.i < 0 || bond.i >= n || bond.j < 0 || bond.j >= n || bond.i == bond.j)
      throw Error(ErrorCode::kIndexOutOfRange,
                  "bond " + std::to_string(b + 1) + " references invalid atoms");
    if (bond.i > bond.j)
      std::swap(bond.i, bond.j);
    if (std::find(adj_[bond.i].begin(), adj_[bond.i].end(), bond.j)
        != adj_[bond.i].end())
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate bond " + std::to_string(bond.i + 1) + "-"
                      + std::to_string(bond.j + 1));
    adj_[bond.i].push_back(bond.j);
    adj_[bond.j].push_back(bond.i);
    bond_adj[bond.i].push_back(static_cast<int>(b));
    bond_adj[bond.j].push_back(static_cast<int>(b));
  }
  for (auto &nbrs: adj_)
    std::sort(nbrs.begin(), nbrs.end());

  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (atoms_[i].is_heavy()) {
      heavy_.push_back(i);
      ++heavy_count_;
    }
  }

  ring_ = find_ring_bonds(atoms_.size(), bonds_, bond_adj);

  if (!atoms_.empty()) {
    std::vector<bool> seen(atoms_.size(), false);
    std::queue<int> q;
    q.push(0);
    seen[0] = true;
    std::size_t count = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v: adj_[u]) {
        if (!seen[v]) {
          seen[v] = true;
          ++count;
          q.push(v);
        }
      }
    }
    connected_ = count == atoms_.size();
  }
}

int Molecule::find_bond(int i, int j) const {
  if (i > j)
    std::swap(i, j);
  for (std::size_t b = 0; b < bonds_.size(); ++b) {
    if (bonds_[b].i == i && bonds_[b].j == j)
      return static_cast<int>(b);
  }
  return -1;
}

std::vector<std::size_t> Molecule::all_indices() const {
  std::vector<std::size_t> idx(atoms_.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    idx[i] = i;
  return idx;
}

std::vector<std::vector<int>> Molecule::topological_distances() const {
  const std::size_t n = atoms_.size();
  std::vector<std::vector<int>> dist(n, std::vector<int>(n, -1));
  for (std::size_t s = 0; s < n; ++s) {
    auto &row = dist[s];
    row[s] = 0;
    std::queue<int> q;
    q.push(static_cast<int>(s));
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v: adj_[u]) {
        if (row[v] < 0) {
          row[v] = row[u] + 1;
          q.push(v);
        }
      }
    }
  }
  return dist;
}

Molecule perceive_rings(const Molecule &molecule) {
  Molecule out = molecule;
  std::vector<std::vector<int>> bond_adj(out.atoms_.size());
  for (std::size_t b = 0; b < out.bonds_.size(); ++b) {
    bond_adj[out.bonds_[b].i].push_back(static_cast<int>(b));
    bond_adj[out.bonds_[b].j].push_back(static_cast<int>(b));
  }
  out.ring_ = find_ring_bonds(out.atoms_.size(), out.bonds_, bond_adj);
  return out;
}

std::string_view provenance_name(Provenance p) {
  switch (p) {
  case Provenance::kUniform:
    return "uniform";
  case Provenance::kGeometric:
    return "geometric";
  case Provenance::kEnergy:
    return "energy";
  case Provenance::kExternal:
    return "external";
  case Provenance::kReference:
    return "reference";
  }
  return "unknown";
}

void validate_conformer(const Molecule &molecule, const Conformer &conformer) {
  if (conformer.size() != molecule.size())
    throw Error(ErrorCode::kEnsembleMismatch,
                "conformer has " + std::to_string(conformer.size())
                    + " atoms, molecule has " + std::to_string(molecule.size()));
  for (const auto &p: conformer.coords) {
    if (!p.allFinite())
      throw Error(ErrorCode::kInvalidArgument, "non-finite coordinate");
  }
}

void validate_ensemble(const Molecule &molecule, const Ensemble &ensemble) {
  for (const auto &c: ensemble.conformers) {
    if (c.molecule_id != ensemble.molecule_id)
      throw Error(ErrorCode::kEnsembleMismatch,
                  "conformer molecule id '" + c.molecule_id
                      + "' differs from ensemble id '" + ensemble.molecule_id + "'");
    validate_conformer(molecule, c);
  }
}

}  // namespace confkit
