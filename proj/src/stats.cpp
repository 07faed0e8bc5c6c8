#include "langlab/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "langlab/error.hpp"
#include "langlab/util.hpp"

namespace langlab::stats {

namespace {

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0)
    throw ValidationError("spearman: zero rank variance, rho undefined");
  return sxy / std::sqrt(sxx * syy);
}

double t_approx_p(double rho, size_t n) {
  const double df = static_cast<double>(n) - 2.0;
  if (std::abs(rho) >= 1.0) return 0.0;
  const double t = rho * std::sqrt(df / (1.0 - rho * rho));
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(dist, -std::abs(t));
}

}  // namespace

std::vector<double> ranks_average(const std::vector<double>& x) {
  const size_t n = x.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n, 0.0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

Corr spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size())
    throw ValidationError("spearman: length mismatch");
  if (x.size() < 3)
    throw ValidationError("spearman: need at least 3 observations");
  for (double v : x)
    if (!std::isfinite(v)) throw ValidationError("spearman: non-finite value");
  for (double v : y)
    if (!std::isfinite(v)) throw ValidationError("spearman: non-finite value");
  const double rho = pearson(ranks_average(x), ranks_average(y));
  return {rho, t_approx_p(rho, x.size())};
}

Corr matrix_correlation(const dist::DistanceMatrix& a,
                        const dist::DistanceMatrix& b) {
  std::set<std::string> sa(a.languages().begin(), a.languages().end());
  std::set<std::string> sb(b.languages().begin(), b.languages().end());
  if (sa != sb) {
    std::string msg = "matrix_correlation: language sets differ (" + a.label() +
                      " vs " + b.label() + ");";
    for (const auto& l : sa)
      if (!sb.count(l)) msg += " -" + l;
    for (const auto& l : sb)
      if (!sa.count(l)) msg += " +" + l;
    throw ValidationError(msg);
  }
  const dist::DistanceMatrix aligned = b.restrict(a.languages());
  return spearman(a.upper_triangle(), aligned.upper_triangle());
}

double mantel_test(const dist::DistanceMatrix& a, const dist::DistanceMatrix& b,
                   int permutations, std::uint64_t seed) {
  if (permutations < 0)
    throw ConfigError("mantel_test: permutations must be >= 0");
  const Corr obs = matrix_correlation(a, b);
  if (permutations == 0) return 1.0;

  const dist::DistanceMatrix aligned = b.restrict(a.languages());
  const std::vector<double> ua = a.upper_triangle();
  const int n = a.size();

  Rng master(seed);
  int hits = 0;
  std::vector<int> perm(static_cast<size_t>(n));
  std::vector<double> ub;
  ub.reserve(ua.size());
  for (int t = 0; t < permutations; ++t) {
    Rng trial = master.fork(static_cast<std::uint64_t>(t));
    std::iota(perm.begin(), perm.end(), 0);
    trial.shuffle(perm);
    ub.clear();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        ub.push_back(aligned.at(perm[static_cast<size_t>(i)],
                                perm[static_cast<size_t>(j)]));
    const double rho = spearman(ua, ub).rho;
    if (std::abs(rho) >= std::abs(obs.rho)) ++hits;
  }
  return (1.0 + hits) / (1.0 + permutations);
}

CorrTable correlation_table(const std::vector<dist::DistanceMatrix>& matrices) {
  if (matrices.empty())
    throw ValidationError("correlation_table: no matrices");
  {
    std::set<std::string> labels;
    for (const auto& m : matrices)
      if (!labels.insert(m.label()).second)
        throw ValidationError("correlation_table: duplicate label " + m.label());
  }
  const auto n = static_cast<Eigen::Index>(matrices.size());
  CorrTable t;
  for (const auto& m : matrices) t.labels.push_back(m.label());
  t.rho = Eigen::MatrixXd::Identity(n, n);
  t.p = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Corr c = matrix_correlation(matrices[static_cast<size_t>(i)],
                                        matrices[static_cast<size_t>(j)]);
      t.rho(i, j) = t.rho(j, i) = c.rho;
      t.p(i, j) = t.p(j, i) = c.p;
    }
  return t;
}

std::string corr_csv(const CorrTable& t) {
  std::string out = "a,b,rho,p,significant\n";
  const auto n = static_cast<Eigen::Index>(t.labels.size());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      out += t.labels[static_cast<size_t>(i)] + "," +
             t.labels[static_cast<size_t>(j)] + "," + format_double(t.rho(i, j)) +
             "," + format_double(t.p(i, j)) + "," +
             (t.starred(static_cast<int>(i), static_cast<int>(j)) ? "*" : "") +
             "\n";
    }
  return out;
}

std::string corr_heatmap(const CorrTable& t) {
  const auto n = static_cast<Eigen::Index>(t.labels.size());
  size_t width = 6;
  for (const auto& l : t.labels) width = std::max(width, l.size() + 1);

  auto pad = [&](const std::string& s) {
    std::string out = s;
    while (out.size() < width) out += ' ';
    return out;
  };

  std::string out = pad("");
  for (const auto& l : t.labels) out += pad(l);
  out += '\n';
  for (Eigen::Index i = 0; i < n; ++i) {
    out += pad(t.labels[static_cast<size_t>(i)]);
    for (Eigen::Index j = 0; j < n; ++j) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%+.2f%s", t.rho(i, j),
                    t.starred(static_cast<int>(i), static_cast<int>(j)) ? "*" : " ");
      out += pad(buf);
    }
    out += '\n';
  }
  return out;
}

}  // namespace langlab::stats
