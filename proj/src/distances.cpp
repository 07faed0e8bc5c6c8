#include "langlab/distances.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "langlab/error.hpp"
#include "langlab/util.hpp"

namespace langlab::dist {

namespace {

constexpr double kEarthRadiusKm = 6371.0088;  // IUGG mean radius

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

DistanceMatrix DistanceMatrix::make(std::vector<std::string> languages,
                                    Eigen::MatrixXd values, std::string label) {
  const auto n = static_cast<Eigen::Index>(languages.size());
  if (values.rows() != n || values.cols() != n)
    throw ValidationError("distance matrix '" + label + "': shape " +
                          std::to_string(values.rows()) + "x" +
                          std::to_string(values.cols()) + " does not match " +
                          std::to_string(n) + " languages");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (values(i, i) != 0.0)
      throw ValidationError("distance matrix '" + label +
                            "': nonzero diagonal at " + languages[i]);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = values(i, j);
      if (!std::isfinite(v) || v < 0.0)
        throw ValidationError("distance matrix '" + label + "': bad value at (" +
                              languages[i] + ", " + languages[j] + ")");
      if (std::abs(v - values(j, i)) > 1e-12)
        throw ValidationError("distance matrix '" + label + "': asymmetry at (" +
                              languages[i] + ", " + languages[j] + ")");
    }
  }
  // First-seen duplicate check.
  {
    std::set<std::string> seen;
    for (const auto& l : languages)
      if (!seen.insert(l).second)
        throw ValidationError("distance matrix '" + label +
                              "': duplicate language " + l);
  }
  DistanceMatrix m;
  m.languages_ = std::move(languages);
  m.values_ = std::move(values);
  m.label_ = std::move(label);
  return m;
}

int DistanceMatrix::index_of(const std::string& lang) const {
  auto it = std::find(languages_.begin(), languages_.end(), lang);
  return it == languages_.end()
             ? -1
             : static_cast<int>(it - languages_.begin());
}

std::vector<double> DistanceMatrix::upper_triangle() const {
  std::vector<double> out;
  const int n = size();
  out.reserve(static_cast<size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) out.push_back(values_(i, j));
  return out;
}

DistanceMatrix DistanceMatrix::restrict(
    const std::vector<std::string>& subset) const {
  std::vector<int> idx;
  idx.reserve(subset.size());
  for (const auto& lang : subset) {
    int i = index_of(lang);
    if (i < 0)
      throw ValidationError("distance matrix '" + label_ +
                            "': unknown language " + lang);
    idx.push_back(i);
  }
  const auto m = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd sub(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b)
      sub(a, b) = values_(idx[a], idx[b]);
  return make(subset, std::move(sub), label_);
}

std::string to_csv(const DistanceMatrix& m) {
  std::string out = "lang";
  for (const auto& l : m.languages()) {
    out += ',';
    out += l;
  }
  out += '\n';
  for (int i = 0; i < m.size(); ++i) {
    out += m.languages()[i];
    for (int j = 0; j < m.size(); ++j) {
      out += ',';
      out += fmt9(m.at(i, j));
    }
    out += '\n';
  }
  return out;
}

DistanceMatrix distance_matrix_from_csv(std::string_view text,
                                        const std::string& label) {
  std::vector<std::string> lines;
  for (auto& line : split(std::string(text), '\n')) {
    std::string t(trim(line));
    if (!t.empty()) lines.push_back(t);
  }
  if (lines.size() < 2)
    throw ParseError("distance csv '" + label + "': too few lines");
  auto header = split(lines[0], ',');
  if (header.size() < 2 || header[0] != "lang")
    throw ParseError("distance csv '" + label + "': bad header");
  std::vector<std::string> languages(header.begin() + 1, header.end());
  const auto n = static_cast<Eigen::Index>(languages.size());
  if (static_cast<Eigen::Index>(lines.size()) - 1 != n)
    throw ParseError("distance csv '" + label + "': expected " +
                     std::to_string(n) + " rows, got " +
                     std::to_string(lines.size() - 1));
  Eigen::MatrixXd values(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto cells = split(lines[i + 1], ',');
    if (static_cast<Eigen::Index>(cells.size()) != n + 1)
      throw ParseError("distance csv '" + label + "': row " +
                       std::to_string(i + 1) + " has " +
                       std::to_string(cells.size()) + " cells");
    if (cells[0] != languages[i])
      throw ParseError("distance csv '" + label + "': row label " + cells[0] +
                       " does not match column " + languages[i]);
    for (Eigen::Index j = 0; j < n; ++j) {
      try {
        values(i, j) = std::stod(cells[j + 1]);
      } catch (const std::exception&) {
        throw ParseError("distance csv '" + label + "': bad number '" +
                         cells[j + 1] + "'");
      }
    }
  }
  return DistanceMatrix::make(std::move(languages), std::move(values), label);
}

DistanceMatrix cosine_distance_matrix(std::vector<std::string> languages,
                                      const std::vector<Eigen::VectorXd>& vecs,
                                      std::string label) {
  if (languages.size() != vecs.size())
    throw ValidationError("cosine distance '" + label +
                          "': language/vector count mismatch");
  const auto n = static_cast<Eigen::Index>(vecs.size());
  std::vector<double> norms(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    norms[i] = vecs[i].norm();
    if (norms[i] <= 0.0 || !std::isfinite(norms[i]))
      throw ValidationError("cosine distance '" + label +
                            "': zero or non-finite vector for " + languages[i]);
  }
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double cosv = vecs[i].dot(vecs[j]) / (norms[i] * norms[j]);
      cosv = std::clamp(cosv, -1.0, 1.0);
      double d = 1.0 - cosv;
      if (d < 0.0) d = 0.0;
      values(i, j) = values(j, i) = d;
    }
  return DistanceMatrix::make(std::move(languages), std::move(values),
                              std::move(label));
}

StructVector structural_vector(const Treebank& tb) {
  StructVector sv;
  sv.language = tb.language;
  std::map<LinkKey, double> counts;
  double total = 0.0;
  for (const auto& sent : tb.sentences) {
    for (const auto& tok : sent.tokens) {
      if (tok.head == 0) continue;  // no link for the root
      const Token& head = sent.tokens[static_cast<size_t>(tok.head - 1)];
      LinkKey key{head.upos, tok.upos, tok.deprel,
                  head.index > tok.index ? 'R' : 'L'};
      counts[key] += 1.0;
      total += 1.0;
    }
  }
  if (total == 0.0)
    throw ValidationError("structural vector: treebank " + tb.language +
                          " has no dependency links");
  for (auto& [key, c] : counts) c /= total;
  sv.features = std::move(counts);
  return sv;
}

DistanceMatrix structural_distance(const std::vector<StructVector>& vectors) {
  std::set<LinkKey> keyset;
  for (const auto& sv : vectors)
    for (const auto& [key, _] : sv.features) keyset.insert(key);
  std::vector<LinkKey> keys(keyset.begin(), keyset.end());
  std::map<LinkKey, int> key_index;
  for (size_t i = 0; i < keys.size(); ++i) key_index[keys[i]] = static_cast<int>(i);

  std::vector<std::string> languages;
  std::vector<Eigen::VectorXd> dense;
  for (const auto& sv : vectors) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(keys.size()));
    for (const auto& [key, freq] : sv.features) v(key_index.at(key)) = freq;
    languages.push_back(sv.language);
    dense.push_back(std::move(v));
  }
  return cosine_distance_matrix(std::move(languages), dense, "structural");
}

std::string struct_vectors_tsv(const std::vector<StructVector>& vectors) {
  std::string out = "lang\thead_upos\tdep_upos\tdeprel\tdir\tfreq\n";
  for (const auto& sv : vectors)
    for (const auto& [key, freq] : sv.features) {
      out += sv.language;
      out += '\t';
      out += key.head_upos;
      out += '\t';
      out += key.dep_upos;
      out += '\t';
      out += key.deprel;
      out += '\t';
      out += key.dir;
      out += '\t';
      out += format_double(freq);
      out += '\n';
    }
  return out;
}

void StructCensus::add(const Treebank& tb) {
  for (const auto& sent : tb.sentences)
    for (const auto& tok : sent.tokens) {
      if (tok.head == 0) continue;
      const Token& head = sent.tokens[static_cast<size_t>(tok.head - 1)];
      keys_.insert(LinkKey{head.upos, tok.upos, tok.deprel,
                           head.index > tok.index ? 'R' : 'L'});
    }
}

GeoTable load_coordinates(std::string_view text) {
  GeoTable table;
  int lineno = 0;
  for (auto& raw : split(std::string(text), '\n')) {
    ++lineno;
    std::string line(trim(raw));
    if (line.empty()) continue;
    if (lineno == 1 && line.starts_with("lang")) continue;
    auto cells = split(line, ',');
    if (cells.size() != 3)
      throw ParseError("coordinates line " + std::to_string(lineno) +
                       ": expected lang,lat,lon");
    double lat, lon;
    try {
      lat = std::stod(cells[1]);
      lon = std::stod(cells[2]);
    } catch (const std::exception&) {
      throw ParseError("coordinates line " + std::to_string(lineno) +
                       ": bad number");
    }
    if (lat < -90.0 || lat > 90.0 || lon < -180.0 || lon > 180.0)
      throw ValidationError("coordinates line " + std::to_string(lineno) +
                            ": out of range for " + cells[0]);
    if (!table.coords.emplace(cells[0], std::make_pair(lat, lon)).second)
      throw ValidationError("coordinates: duplicate language " + cells[0]);
  }
  if (table.coords.empty()) throw ParseError("coordinates: no entries");
  return table;
}

double haversine_km(double lat1, double lon1, double lat2, double lon2) {
  constexpr double kDeg = std::numbers::pi / 180.0;
  const double phi1 = lat1 * kDeg;
  const double phi2 = lat2 * kDeg;
  const double dphi = (lat2 - lat1) * kDeg;
  const double dlam = (lon2 - lon1) * kDeg;
  const double a = std::sin(dphi / 2) * std::sin(dphi / 2) +
                   std::cos(phi1) * std::cos(phi2) * std::sin(dlam / 2) *
                       std::sin(dlam / 2);
  return 2.0 * kEarthRadiusKm *
         std::atan2(std::sqrt(a), std::sqrt(std::max(0.0, 1.0 - a)));
}

DistanceMatrix geo_distance(const GeoTable& table,
                            const std::vector<std::string>& languages) {
  std::vector<std::string> missing;
  for (const auto& lang : languages)
    if (!table.coords.count(lang)) missing.push_back(lang);
  if (!missing.empty()) {
    std::string msg = "geographic distance: no coordinates for";
    for (const auto& l : missing) msg += " " + l;
    throw ValidationError(msg);
  }
  const auto n = static_cast<Eigen::Index>(languages.size());
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& [lat1, lon1] = table.coords.at(languages[i]);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto& [lat2, lon2] = table.coords.at(languages[j]);
      values(i, j) = values(j, i) = haversine_km(lat1, lon1, lat2, lon2);
    }
  }
  return DistanceMatrix::make(languages, std::move(values), "geographic");
}

DistanceMatrix genetic_distance(const DendroTree& gold,
                                const std::vector<std::string>& languages) {
  LeafPairDistances lpd = leaf_pair_distances(gold);
  std::vector<std::string> missing;
  for (const auto& lang : languages)
    if (lpd.index_of(lang) < 0) missing.push_back(lang);
  if (!missing.empty()) {
    std::string msg = "genetic distance: gold tree has no leaf for";
    for (const auto& l : missing) msg += " " + l;
    throw ValidationError(msg);
  }
  const auto n = static_cast<Eigen::Index>(languages.size());
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      values(i, j) = values(j, i) = lpd.at(languages[i], languages[j]);
  return DistanceMatrix::make(languages, std::move(values), "genetic");
}

}  // namespace langlab::dist
