#include "langlab/causal.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <set>

#include "langlab/error.hpp"
#include "langlab/stats.hpp"
#include "langlab/util.hpp"

namespace langlab::causal {

namespace {

// Spearman correlation matrix of the table's columns.
Eigen::MatrixXd rank_correlations(const SampleTable& table) {
  const auto rows = table.values.rows();
  const auto vars = table.values.cols();
  Eigen::MatrixXd ranks(rows, vars);
  for (Eigen::Index v = 0; v < vars; ++v) {
    std::vector<double> col(static_cast<size_t>(rows));
    for (Eigen::Index r = 0; r < rows; ++r) col[static_cast<size_t>(r)] = table.values(r, v);
    std::vector<double> rk = stats::ranks_average(col);
    for (Eigen::Index r = 0; r < rows; ++r) ranks(r, v) = rk[static_cast<size_t>(r)];
  }
  Eigen::MatrixXd centered = ranks.rowwise() - ranks.colwise().mean();
  Eigen::VectorXd norms = centered.colwise().norm();
  for (Eigen::Index v = 0; v < vars; ++v)
    if (norms(v) <= 0.0)
      throw ValidationError("ci_test: column " +
                            table.variables[static_cast<size_t>(v)] +
                            " has zero rank variance");
  Eigen::MatrixXd corr = (centered.transpose() * centered).eval();
  for (Eigen::Index a = 0; a < vars; ++a)
    for (Eigen::Index b = 0; b < vars; ++b) corr(a, b) /= norms(a) * norms(b);
  return corr;
}

CIResult partial_test(const Eigen::MatrixXd& corr, Eigen::Index n_rows, int x,
                      int y, const std::vector<int>& z,
                      const CITestConfig& config) {
  const auto m = static_cast<Eigen::Index>(z.size()) + 2;
  if (n_rows - static_cast<Eigen::Index>(z.size()) - 3 < 1)
    throw ValidationError(
        "ci_test: too few rows for conditioning set of size " +
        std::to_string(z.size()) + " (need n >= |Z| + 4)");

  double r;
  if (z.empty()) {
    r = corr(x, y);
  } else {
    Eigen::MatrixXd sub(m, m);
    std::vector<int> idx = {x, y};
    idx.insert(idx.end(), z.begin(), z.end());
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b < m; ++b)
        sub(a, b) = corr(idx[static_cast<size_t>(a)], idx[static_cast<size_t>(b)]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
    if (!lu.isInvertible())
      throw ValidationError("ci_test: singular conditioning submatrix");
    Eigen::MatrixXd prec = lu.inverse();
    const double denom = prec(0, 0) * prec(1, 1);
    if (denom <= 0.0)
      throw ValidationError("ci_test: singular conditioning submatrix");
    r = -prec(0, 1) / std::sqrt(denom);
  }

  double p;
  if (std::abs(r) >= 1.0) {
    p = 0.0;
  } else {
    const double zstat = std::atanh(r) *
                         std::sqrt(static_cast<double>(n_rows) -
                                   static_cast<double>(z.size()) - 3.0);
    p = std::erfc(std::abs(zstat) / std::sqrt(2.0));
  }
  return {p >= config.alpha, p};
}

}  // namespace

int SampleTable::var_index(const std::string& name) const {
  auto it = std::find(variables.begin(), variables.end(), name);
  return it == variables.end() ? -1 : static_cast<int>(it - variables.begin());
}

std::string SampleTable::to_csv() const {
  std::string out = "pair";
  for (const auto& v : variables) out += "," + v;
  out += '\n';
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    out += row_labels.empty() ? std::to_string(r)
                              : row_labels[static_cast<size_t>(r)];
    for (Eigen::Index v = 0; v < values.cols(); ++v) {
      out += ',';
      out += format_double(values(r, v));
    }
    out += '\n';
  }
  return out;
}

SampleTable SampleTable::from_csv(std::string_view text) {
  std::vector<std::string> lines;
  for (auto& line : split(std::string(text), '\n')) {
    std::string t(trim(line));
    if (!t.empty()) lines.push_back(t);
  }
  if (lines.size() < 2) throw ParseError("sample table: too few lines");
  auto header = split(lines[0], ',');
  const bool labelled = !header.empty() && header[0] == "pair";
  const size_t first_var = labelled ? 1 : 0;
  if (header.size() <= first_var)
    throw ParseError("sample table: no variable columns");

  SampleTable t;
  t.variables.assign(header.begin() + static_cast<std::ptrdiff_t>(first_var),
                     header.end());
  const auto rows = static_cast<Eigen::Index>(lines.size() - 1);
  const auto vars = static_cast<Eigen::Index>(t.variables.size());
  t.values.resize(rows, vars);
  for (Eigen::Index r = 0; r < rows; ++r) {
    auto cells = split(lines[static_cast<size_t>(r) + 1], ',');
    if (cells.size() != header.size())
      throw ParseError("sample table: row " + std::to_string(r + 1) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(header.size()));
    if (labelled) t.row_labels.push_back(cells[0]);
    for (Eigen::Index v = 0; v < vars; ++v) {
      try {
        t.values(r, v) = std::stod(cells[static_cast<size_t>(v) + first_var]);
      } catch (const std::exception&) {
        throw ParseError("sample table: bad number in row " +
                         std::to_string(r + 1));
      }
    }
  }
  return t;
}

SampleTable sample_table_from_matrices(
    const std::vector<dist::DistanceMatrix>& matrices) {
  if (matrices.empty())
    throw ValidationError("sample table: no matrices");
  const auto& langs = matrices.front().languages();
  std::vector<dist::DistanceMatrix> aligned;
  for (const auto& m : matrices) aligned.push_back(m.restrict(langs));

  const int n = static_cast<int>(langs.size());
  SampleTable t;
  for (const auto& m : aligned) t.variables.push_back(m.label());
  const auto pairs = static_cast<Eigen::Index>(n) * (n - 1) / 2;
  t.values.resize(pairs, static_cast<Eigen::Index>(aligned.size()));
  Eigen::Index row = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, ++row) {
      t.row_labels.push_back(langs[static_cast<size_t>(i)] + "-" +
                             langs[static_cast<size_t>(j)]);
      for (size_t v = 0; v < aligned.size(); ++v)
        t.values(row, static_cast<Eigen::Index>(v)) = aligned[v].at(i, j);
    }
  return t;
}

void CITestConfig::validate() const {
  if (alpha <= 0.0 || alpha >= 1.0)
    throw ConfigError("ci config: alpha must be in (0, 1)");
  if (max_cond < -1) throw ConfigError("ci config: bad max_cond");
}

CIResult ci_test(const SampleTable& table, int x, int y,
                 const std::vector<int>& z, const CITestConfig& config) {
  config.validate();
  const int vars = static_cast<int>(table.variables.size());
  auto in_range = [&](int v) { return v >= 0 && v < vars; };
  if (!in_range(x) || !in_range(y) || x == y)
    throw ConfigError("ci_test: bad variable indices");
  std::set<int> zs(z.begin(), z.end());
  if (zs.size() != z.size() || zs.count(x) || zs.count(y))
    throw ConfigError("ci_test: conditioning set overlaps tested pair");
  for (int v : z)
    if (!in_range(v)) throw ConfigError("ci_test: bad conditioning index");
  return partial_test(rank_correlations(table), table.values.rows(), x, y, z,
                      config);
}

std::string to_string(Mark m) {
  switch (m) {
    case Mark::genuine: return "genuine";
    case Mark::potential: return "potential";
    case Mark::spurious: return "spurious";
    case Mark::undetermined: return "undetermined";
  }
  return "?";
}

const PDAGEdge* MarkedPDAG::find_edge(const std::string& a,
                                      const std::string& b) const {
  for (const auto& e : edges)
    if ((e.from == a && e.to == b) || (e.from == b && e.to == a)) return &e;
  return nullptr;
}

MarkedPDAG ic_star(const SampleTable& table, const CITestConfig& config) {
  config.validate();
  const int n = static_cast<int>(table.variables.size());
  if (n < 3)
    throw ValidationError("ic_star: need at least 3 variables");
  const int max_cond = config.max_cond < 0 ? n - 2 : config.max_cond;
  const Eigen::MatrixXd corr = rank_correlations(table);
  const Eigen::Index rows = table.values.rows();

  std::vector<std::vector<bool>> adj(static_cast<size_t>(n),
                                     std::vector<bool>(static_cast<size_t>(n), false));
  std::map<std::pair<int, int>, std::vector<int>> sepsets;

  // Step 1: each pair is adjacent unless some conditioning set over the
  // remaining variables separates it; smallest sets first, ties by index.
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) {
      std::vector<int> rest;
      for (int v = 0; v < n; ++v)
        if (v != x && v != y) rest.push_back(v);

      bool separated = false;
      std::vector<int> sepset;
      const int cap = std::min<int>(max_cond, static_cast<int>(rest.size()));
      for (int size = 0; size <= cap && !separated; ++size) {
        std::vector<int> pick(static_cast<size_t>(size));
        // Lexicographic combinations of `rest` of the given size.
        auto search = [&](auto&& self, int start, int depth) -> bool {
          if (depth == size) {
            CIResult res = partial_test(corr, rows, x, y, pick, config);
            if (res.independent) {
              sepset = pick;
              return true;
            }
            return false;
          }
          for (int i = start; i < static_cast<int>(rest.size()); ++i) {
            pick[static_cast<size_t>(depth)] = rest[static_cast<size_t>(i)];
            if (self(self, i + 1, depth + 1)) return true;
          }
          return false;
        };
        separated = search(search, 0, 0);
      }
      if (separated) {
        sepsets[{x, y}] = sepset;
      } else {
        adj[static_cast<size_t>(x)][static_cast<size_t>(y)] = true;
        adj[static_cast<size_t>(y)][static_cast<size_t>(x)] = true;
      }
    }

  // arrow[a][b]: arrowhead at b on edge a-b; genuine[a][b]: a->b marked.
  std::vector<std::vector<bool>> arrow(static_cast<size_t>(n),
                                       std::vector<bool>(static_cast<size_t>(n), false));
  std::vector<std::vector<bool>> genuine(static_cast<size_t>(n),
                                         std::vector<bool>(static_cast<size_t>(n), false));
  auto is_adj = [&](int a, int b) { return adj[static_cast<size_t>(a)][static_cast<size_t>(b)]; };

  // Step 2: colliders a *-> c <-* b when c is outside sepset(a, b).
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      if (is_adj(a, b)) continue;
      const auto& sep = sepsets.at({a, b});
      for (int c = 0; c < n; ++c) {
        if (c == a || c == b || !is_adj(a, c) || !is_adj(b, c)) continue;
        if (std::find(sep.begin(), sep.end(), c) == sep.end()) {
          arrow[static_cast<size_t>(a)][static_cast<size_t>(c)] = true;
          arrow[static_cast<size_t>(b)][static_cast<size_t>(c)] = true;
        }
      }
    }

  // Step 3: closure rules to fixpoint.
  bool changed = true;
  while (changed) {
    changed = false;
    // R1: a *-> c - b with (a, b) non-adjacent orients c -> b, marked.
    for (int c = 0; c < n; ++c)
      for (int a = 0; a < n; ++a) {
        if (a == c || !is_adj(a, c) ||
            !arrow[static_cast<size_t>(a)][static_cast<size_t>(c)])
          continue;
        for (int b = 0; b < n; ++b) {
          if (b == a || b == c || !is_adj(b, c) || is_adj(a, b)) continue;
          if (arrow[static_cast<size_t>(b)][static_cast<size_t>(c)]) continue;
          if (!arrow[static_cast<size_t>(c)][static_cast<size_t>(b)] ||
              !genuine[static_cast<size_t>(c)][static_cast<size_t>(b)]) {
            arrow[static_cast<size_t>(c)][static_cast<size_t>(b)] = true;
            genuine[static_cast<size_t>(c)][static_cast<size_t>(b)] = true;
            changed = true;
          }
        }
      }
    // R2: adjacent a-b with a marked directed path a ~> b orients a -> b.
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        if (a == b || !is_adj(a, b) ||
            arrow[static_cast<size_t>(a)][static_cast<size_t>(b)])
          continue;
        // BFS along genuine-marked directed edges.
        std::vector<bool> seen(static_cast<size_t>(n), false);
        std::vector<int> stack = {a};
        seen[static_cast<size_t>(a)] = true;
        bool reached = false;
        while (!stack.empty() && !reached) {
          const int u = stack.back();
          stack.pop_back();
          for (int v = 0; v < n; ++v) {
            if (seen[static_cast<size_t>(v)] || !is_adj(u, v)) continue;
            if (!genuine[static_cast<size_t>(u)][static_cast<size_t>(v)] ||
                !arrow[static_cast<size_t>(u)][static_cast<size_t>(v)])
              continue;
            if (v == b) {
              reached = true;
              break;
            }
            seen[static_cast<size_t>(v)] = true;
            stack.push_back(v);
          }
        }
        if (reached) {
          arrow[static_cast<size_t>(a)][static_cast<size_t>(b)] = true;
          changed = true;
        }
      }
  }

  MarkedPDAG g;
  g.nodes = table.variables;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      if (!is_adj(a, b)) {
        std::vector<std::string> names;
        for (int v : sepsets.at({a, b}))
          names.push_back(table.variables[static_cast<size_t>(v)]);
        g.sepsets[{table.variables[static_cast<size_t>(a)],
                   table.variables[static_cast<size_t>(b)]}] = names;
        continue;
      }
      const bool at_b = arrow[static_cast<size_t>(a)][static_cast<size_t>(b)];
      const bool at_a = arrow[static_cast<size_t>(b)][static_cast<size_t>(a)];
      PDAGEdge e;
      if (at_a && at_b) {
        e = {table.variables[static_cast<size_t>(a)],
             table.variables[static_cast<size_t>(b)], Mark::spurious};
      } else if (at_b) {
        e = {table.variables[static_cast<size_t>(a)],
             table.variables[static_cast<size_t>(b)],
             genuine[static_cast<size_t>(a)][static_cast<size_t>(b)]
                 ? Mark::genuine
                 : Mark::potential};
      } else if (at_a) {
        e = {table.variables[static_cast<size_t>(b)],
             table.variables[static_cast<size_t>(a)],
             genuine[static_cast<size_t>(b)][static_cast<size_t>(a)]
                 ? Mark::genuine
                 : Mark::potential};
      } else {
        e = {table.variables[static_cast<size_t>(a)],
             table.variables[static_cast<size_t>(b)], Mark::undetermined};
      }
      g.edges.push_back(std::move(e));
    }
  return g;
}

std::string export_dot(const MarkedPDAG& graph) {
  std::string out = "digraph ic_star {\n";
  out +=
      "  // association structure over language-pair measures; rows are\n"
      "  // language pairs treated as i.i.d. samples, which they are not --\n"
      "  // read edges as suggestive, not proof of causation\n";
  out += "  node [shape=ellipse];\n";
  for (const auto& node : graph.nodes) out += "  \"" + node + "\";\n";
  for (const auto& e : graph.edges) {
    out += "  \"" + e.from + "\" -> \"" + e.to + "\"";
    switch (e.mark) {
      case Mark::genuine:
        out += " [label=genuine]";
        break;
      case Mark::potential:
        out += " [style=dashed, label=potential]";
        break;
      case Mark::spurious:
        out += " [dir=both, label=spurious]";
        break;
      case Mark::undetermined:
        out += " [dir=none]";
        break;
    }
    out += ";\n";
  }
  out += "}\n";
  return out;
}

std::string sepsets_csv(const MarkedPDAG& graph) {
  std::string out = "a,b,sepset\n";
  for (const auto& [pair, sep] : graph.sepsets) {
    out += pair.first + "," + pair.second + ",";
    for (size_t i = 0; i < sep.size(); ++i) {
      if (i) out += ' ';
      out += sep[i];
    }
    out += '\n';
  }
  return out;
}

}  // namespace langlab::causal
