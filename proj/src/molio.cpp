//
// confkit - conformer ensemble generation and benchmarking
// SPDX-License-Identifier: Apache-2.0
//

#include "confkit/molio.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "confkit/elements.hpp"
#include "confkit/error.hpp"

namespace confkit {
namespace {
  constexpr std::string_view kEnergyTag = "confkit.energy";
  constexpr std::string_view kProvenanceTag = "confkit.provenance";

  std::string_view trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
      return { };
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  std::string_view column(std::string_view line, std::size_t begin, std::size_t len) {
    if (begin >= line.size())
      return { };
    return line.substr(begin, len);
  }

  std::optional<int> parse_int(std::string_view s) {
    s = trim(s);
    if (s.empty())
      return std::nullopt;
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      return std::nullopt;
    return v;
  }

  std::optional<double> parse_real(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+')
      s.remove_prefix(1);
    if (s.empty())
      return std::nullopt;
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
      return std::nullopt;
    return v;
  }

  class LineReader {
  public:
    explicit LineReader(std::string_view text): text_(text) { }

    bool eof() const { return pos_ >= text_.size(); }

    std::string_view next() {
      auto nl = text_.find('\n', pos_);
      std::string_view line;
      if (nl == std::string_view::npos) {
        line = text_.substr(pos_);
        pos_ = text_.size();
      } else {
        line = text_.substr(pos_, nl - pos_);
        pos_ = nl + 1;
      }
      ++lineno_;
      if (!line.empty() && line.back() == '\r')
        line.remove_suffix(1);
      return line;
    }

    int lineno() const { return lineno_; }

    bool rest_is_blank() const { return trim(text_.substr(pos_)).empty(); }

  private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int lineno_ = 0;
  };

  std::string at_line(const LineReader &r) {
    return " (line " + std::to_string(r.lineno()) + ")";
  }

  struct SdfRecord {
    std::string title;
    std::vector<Atom> atoms;
    std::vector<Vec3> coords;
    std::vector<Bond> bonds;
    std::optional<double> energy;
  };

  bool looks_like_atom_line(std::string_view line) {
    return line.size() >= 32 && !line.starts_with("M  ");
  }

  SdfRecord read_sdf_record(LineReader &r) {
    SdfRecord rec;
    rec.title = std::string(trim(r.next()));
    if (r.eof())
      throw Error(ErrorCode::kMalformedRecord, "truncated SDF header" + at_line(r));
    r.next();
    if (r.eof())
      throw Error(ErrorCode::kMalformedRecord, "truncated SDF header" + at_line(r));
    r.next();
    if (r.eof())
      throw Error(ErrorCode::kMalformedCounts, "missing counts line" + at_line(r));

    std::string_view counts = r.next();
    if (counts.find("V3000") != std::string_view::npos)
      throw Error(ErrorCode::kUnsupportedV3000,
                  "V3000 connection tables are not supported" + at_line(r));
    auto natoms = parse_int(column(counts, 0, 3));
    auto nbonds = parse_int(column(counts, 3, 3));
    if (!natoms || !nbonds || *natoms < 0 || *nbonds < 0)
      throw Error(ErrorCode::kMalformedCounts, "malformed counts line" + at_line(r));

    rec.atoms.reserve(*natoms);
    rec.coords.reserve(*natoms);
    for (int a = 0; a < *natoms; ++a) {
      if (r.eof())
        throw Error(ErrorCode::kMalformedCounts,
                    "malformed counts line: atom block ends early" + at_line(r));
      std::string_view line = r.next();
      if (!looks_like_atom_line(line))
        throw Error(ErrorCode::kMalformedCounts,
                    "malformed counts line: expected atom " + std::to_string(a + 1)
                        + at_line(r));
      auto x = parse_real(column(line, 0, 10));
      auto y = parse_real(column(line, 10, 10));
      auto z = parse_real(column(line, 20, 10));
      if (!x || !y || !z)
        throw Error(ErrorCode::kNonNumeric, "non-numeric atom coordinate" + at_line(r));
      std::string symbol(trim(column(line, 31, 3)));
      auto zn = atomic_number(symbol);
      if (!zn)
        throw Error(ErrorCode::kUnknownElement,
                    "unknown element '" + symbol + "'" + at_line(r));
      rec.atoms.push_back({ std::string(element_symbol(*zn)), *zn });
      rec.coords.emplace_back(*x, *y, *z);
    }

    for (int b = 0; b < *nbonds; ++b) {
      if (r.eof())
        throw Error(ErrorCode::kMalformedCounts,
                    "malformed counts line: bond block ends early" + at_line(r));
      std::string_view line = r.next();
      if (line.starts_with("M  ") || line.size() < 9)
        throw Error(ErrorCode::kMalformedCounts,
                    "malformed counts line: expected bond " + std::to_string(b + 1)
                        + at_line(r));
      auto i = parse_int(column(line, 0, 3));
      auto j = parse_int(column(line, 3, 3));
      auto t = parse_int(column(line, 6, 3));
      if (!i || !j || !t)
        throw Error(ErrorCode::kNonNumeric, "non-numeric bond line" + at_line(r));
      if (*i < 1 || *i > *natoms || *j < 1 || *j > *natoms || *i == *j)
        throw Error(ErrorCode::kIndexOutOfRange,
                    "bond atom index out of range" + at_line(r));
      if (*t < 1 || *t > 4)
        throw Error(ErrorCode::kMalformedRecord,
                    "unsupported bond type " + std::to_string(*t) + at_line(r));
      rec.bonds.push_back({ *i - 1, *j - 1, static_cast<BondOrder>(*t) });
    }

    // Property block, then optional data items, then the record separator.
    bool in_props = true;
    while (!r.eof()) {
      std::string_view line = r.next();
      if (line.starts_with("$$$$"))
        return rec;
      if (in_props) {
        if (line.starts_with("M  END"))
          in_props = false;
        continue;
      }
      if (line.starts_with(">")) {
        auto lt = line.find('<');
        auto gt = line.find('>', lt == std::string_view::npos ? 1 : lt);
        if (lt == std::string_view::npos || gt == std::string_view::npos)
          continue;
        std::string_view tag = line.substr(lt + 1, gt - lt - 1);
        if (tag == kEnergyTag && !r.eof()) {
          auto v = parse_real(r.next());
          if (!v)
            throw Error(ErrorCode::kNonNumeric, "non-numeric energy" + at_line(r));
          rec.energy = v;
        }
      }
    }
    if (in_props)
      throw Error(ErrorCode::kMalformedRecord, "missing 'M  END'" + at_line(r));
    return rec;
  }

  bool same_connectivity(const SdfRecord &a, const SdfRecord &b) {
    if (a.atoms.size() != b.atoms.size() || a.bonds.size() != b.bonds.size())
      return false;
    for (std::size_t i = 0; i < a.atoms.size(); ++i) {
      if (a.atoms[i].atomic_number != b.atoms[i].atomic_number)
        return false;
    }
    auto key = [](const Bond &bond) {
      int i = std::min(bond.i, bond.j), j = std::max(bond.i, bond.j);
      return std::tuple(i, j, bond.order);
    };
    std::vector<std::tuple<int, int, BondOrder>> ka, kb;
    for (const auto &bond: a.bonds)
      ka.push_back(key(bond));
    for (const auto &bond: b.bonds)
      kb.push_back(key(bond));
    std::sort(ka.begin(), ka.end());
    std::sort(kb.begin(), kb.end());
    return ka == kb;
  }

  std::string format_coord(double v) {
    char buf[32];
    int n = std::snprintf(buf, sizeof(buf), "%10.4f", v);
    if (n != 10)
      throw Error(ErrorCode::kFieldOverflow,
                  "field overflow: coordinate " + std::to_string(v)
                      + " does not fit the 10.4 V2000 field");
    return buf;
  }

  void check_same_molecule(const Molecule &molecule, const Ensemble &ensemble) {
    if (ensemble.empty())
      throw Error(ErrorCode::kEmptyEnsemble, "cannot write an empty ensemble");
    validate_ensemble(molecule, ensemble);
  }
}  // namespace

MolFile parse_sdf(std::string_view text, std::string_view fallback_id) {
  LineReader r(text);
  std::vector<SdfRecord> records;
  while (!r.eof() && !r.rest_is_blank())
    records.push_back(read_sdf_record(r));
  if (records.empty())
    throw Error(ErrorCode::kEmptyEnsemble, "SDF input contains no records");

  for (std::size_t k = 1; k < records.size(); ++k) {
    if (!same_connectivity(records[0], records[k]))
      throw Error(ErrorCode::kInconsistentConnectivity,
                  "record " + std::to_string(k + 1)
                      + " has different connectivity from record 1");
  }

  std::string id = records[0].title.empty() ? std::string(fallback_id)
                                            : records[0].title;
  MolFile out { Molecule(id, records[0].atoms, records[0].bonds), { id, { } } };
  out.ensemble.conformers.reserve(records.size());
  for (auto &rec: records) {
    Conformer c;
    c.molecule_id = id;
    c.coords = std::move(rec.coords);
    c.energy = rec.energy;
    c.provenance = Provenance::kExternal;
    out.ensemble.conformers.push_back(std::move(c));
  }
  return out;
}

std::string write_sdf(const Molecule &molecule, const Ensemble &ensemble) {
  check_same_molecule(molecule, ensemble);
  if (molecule.size() > 999 || molecule.bonds().size() > 999)
    throw Error(ErrorCode::kFieldOverflow, "field overflow: V2000 counts exceed 999");

  std::string out;
  char buf[128];
  for (const auto &conf: ensemble.conformers) {
    out += molecule.id();
    out += "\n  confkit          3D\n\n";
    std::snprintf(buf, sizeof(buf), "%3zu%3zu  0  0  0  0  0  0  0  0999 V2000\n",
                  molecule.size(), molecule.bonds().size());
    out += buf;
    for (std::size_t i = 0; i < molecule.size(); ++i) {
      const auto &p = conf.coords[i];
      out += format_coord(p.x());
      out += format_coord(p.y());
      out += format_coord(p.z());
      std::snprintf(buf, sizeof(buf),
                    " %-3s 0  0  0  0  0  0  0  0  0  0  0  0\n",
                    molecule.atoms()[i].symbol.c_str());
      out += buf;
    }
    for (const auto &bond: molecule.bonds()) {
      std::snprintf(buf, sizeof(buf), "%3d%3d%3d  0\n", bond.i + 1, bond.j + 1,
                    static_cast<int>(bond.order));
      out += buf;
    }
    out += "M  END\n";
    if (conf.energy) {
      std::snprintf(buf, sizeof(buf), ">  <%s>\n%.17g\n\n",
                    std::string(kEnergyTag).c_str(), *conf.energy);
      out += buf;
    }
    out += ">  <";
    out += kProvenanceTag;
    out += ">\n";
    out += provenance_name(conf.provenance);
    out += "\n\n$$$$\n";
  }
  return out;
}

MolFile parse_xyz(std::string_view text, std::string_view fallback_id) {
  LineReader r(text);
  std::vector<Atom> atoms;
  std::string id;
  Ensemble ensemble;
  bool first = true;

  while (!r.eof()) {
    std::string_view count_line = r.next();
    if (trim(count_line).empty())
      continue;
    auto n = parse_int(count_line);
    if (!n || *n <= 0)
      throw Error(ErrorCode::kNonNumeric, "bad XYZ atom count" + at_line(r));
    if (!first && static_cast<std::size_t>(*n) != atoms.size())
      throw Error(ErrorCode::kFrameAtomMismatch,
                  "frame " + std::to_string(ensemble.size() + 1) + " has "
                      + std::to_string(*n) + " atoms, expected "
                      + std::to_string(atoms.size()));
    if (r.eof())
      throw Error(ErrorCode::kMalformedRecord, "missing XYZ comment line" + at_line(r));
    std::string_view comment = trim(r.next());
    if (first)
      id = comment.empty() ? std::string(fallback_id) : std::string(comment);

    Conformer conf;
    conf.provenance = Provenance::kExternal;
    conf.coords.reserve(*n);
    for (int a = 0; a < *n; ++a) {
      if (r.eof())
        throw Error(ErrorCode::kMalformedRecord, "truncated XYZ frame" + at_line(r));
      std::istringstream ls { std::string(r.next()) };
      std::string sym, xs, ys, zs;
      if (!(ls >> sym >> xs >> ys >> zs))
        throw Error(ErrorCode::kMalformedRecord, "short XYZ atom row" + at_line(r));
      auto x = parse_real(xs), y = parse_real(ys), z = parse_real(zs);
      if (!x || !y || !z)
        throw Error(ErrorCode::kNonNumeric, "non-numeric coordinate" + at_line(r));
      auto zn = atomic_number(sym);
      if (!zn)
        throw Error(ErrorCode::kUnknownElement,
                    "unknown element '" + sym + "'" + at_line(r));
      if (first) {
        atoms.push_back({ std::string(element_symbol(*zn)), *zn });
      } else if (atoms[a].atomic_number != *zn) {
        throw Error(ErrorCode::kFrameAtomMismatch,
                    "element sequence differs from frame 1" + at_line(r));
      }
      conf.coords.emplace_back(*x, *y, *z);
    }
    ensemble.conformers.push_back(std::move(conf));
    first = false;
  }

  if (ensemble.empty())
    throw Error(ErrorCode::kEmptyEnsemble, "XYZ input contains no frames");
  ensemble.molecule_id = id;
  for (auto &c: ensemble.conformers)
    c.molecule_id = id;
  return { Molecule(id, std::move(atoms), { }), std::move(ensemble) };
}

std::string write_xyz(const Molecule &molecule, const Ensemble &ensemble) {
  check_same_molecule(molecule, ensemble);
  std::string out;
  char buf[160];
  for (const auto &conf: ensemble.conformers) {
    out += std::to_string(molecule.size());
    out += '\n';
    out += molecule.id();
    out += '\n';
    for (std::size_t i = 0; i < molecule.size(); ++i) {
      const auto &p = conf.coords[i];
      std::snprintf(buf, sizeof(buf), "%-2s %.10f %.10f %.10f\n",
                    molecule.atoms()[i].symbol.c_str(), p.x(), p.y(), p.z());
      out += buf;
    }
  }
  return out;
}

MolFile read_molecule_file(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  const std::string text = ss.str();
  const std::string stem = path.stem().string();

  auto ext = path.extension().string();
  for (auto &ch: ext)
    ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (ext == ".xyz")
    return parse_xyz(text, stem);
  if (ext == ".sdf" || ext == ".sd" || ext == ".mol")
    return parse_sdf(text, stem);
  throw Error(ErrorCode::kInvalidArgument,
              "unrecognized file extension: " + path.string());
}

void write_molecule_file(const std::filesystem::path &path, const Molecule &molecule,
                         const Ensemble &ensemble) {
  auto ext = path.extension().string();
  std::string text = ext == ".xyz" ? write_xyz(molecule, ensemble)
                                   : write_sdf(molecule, ensemble);
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw Error(ErrorCode::kIo, "cannot write " + path.string());
  os << text;
}

}  // namespace confkit
