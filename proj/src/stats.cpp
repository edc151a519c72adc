#include "ipcfuse/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "ipcfuse/csv.hpp"
#include "ipcfuse/errors.hpp"
#include "ipcfuse/rng.hpp"

namespace ipcfuse::stats {

std::vector<double> ranks(std::span<const double> values) {
  const size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> out(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based average rank
    for (size_t k = i; k <= j; ++k) out[order[k]] = avg;
    i = j + 1;
  }
  return out;
}

namespace {

bool has_ties(std::span<const double> r) {
  for (double v : r) {
    if (v != std::floor(v)) return true;  // average ranks are the only non-integers
  }
  std::vector<double> s(r.begin(), r.end());
  std::sort(s.begin(), s.end());
  return std::adjacent_find(s.begin(), s.end()) != s.end();
}

}  // namespace

std::optional<double> spearman(const SeriesPair& pair) {
  const size_t n = pair.x.size();
  if (n != pair.y.size()) throw InsufficientData("series lengths differ");
  if (n < 2) throw InsufficientData("need at least 2 observations");
  const std::vector<double> rx = ranks(pair.x);
  const std::vector<double> ry = ranks(pair.y);

  if (!has_ties(rx) && !has_ties(ry)) {
    // untied special case: the classic d^2 form, exact
    double d2 = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double d = rx[i] - ry[i];
      d2 += d * d;
    }
    const double nn = static_cast<double>(n);
    return 1.0 - 6.0 * d2 / (nn * (nn * nn - 1.0));
  }

  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = rx[i] - mx;
    const double dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;  // constant series
  return sxy / std::sqrt(sxx * syy);
}

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double ibeta_reg(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double p_value(double rho, int n) {
  if (n < 3) throw InsufficientData("p-value needs n >= 3");
  if (std::fabs(rho) > 1.0 + 1e-12) throw InsufficientData("|rho| > 1");
  rho = std::clamp(rho, -1.0, 1.0);
  if (std::fabs(rho) == 1.0) return 0.0;
  const double nu = static_cast<double>(n - 2);
  const double t2 = rho * rho * nu / (1.0 - rho * rho);
  return ibeta_reg(0.5 * nu, 0.5, nu / (nu + t2));
}

double p_value_permutation(const SeriesPair& pair, uint64_t seed, int draws) {
  const auto observed = spearman(pair);
  if (!observed) throw InsufficientData("undefined correlation");
  const double target = std::fabs(*observed);
  CounterRng rng(seed, 0x5045524dULL);
  SeriesPair work = pair;
  int hits = 0;
  for (int d = 0; d < draws; ++d) {
    for (size_t i = work.y.size(); i > 1; --i) {
      std::swap(work.y[i - 1], work.y[rng.uniform_int(i)]);
    }
    const auto r = spearman(work);
    if (r && std::fabs(*r) >= target - 1e-12) ++hits;
  }
  return static_cast<double>(hits + 1) / static_cast<double>(draws + 1);
}

std::string_view to_string(Level level) {
  switch (level) {
    case Level::Country: return "country";
    case Level::Region: return "region";
    case Level::District: return "district";
  }
  return "";
}

std::map<std::string, SeriesPair> aggregate_level(std::span<const fuse::FusedRecord> fused,
                                                  Level level) {
  auto key_of = [&](const fuse::AdminUnit& u) {
    switch (level) {
      case Level::Country: return u.country;
      case Level::Region: return u.country + "/" + u.admin1;
      case Level::District: return u.country + "/" + u.admin1 + "/" + u.admin2;
    }
    return std::string{};
  };

  struct Cell {
    double conflicts = 0.0;
    double phase_area = 0.0;
    double area = 0.0;
  };
  std::map<std::string, std::map<Period, Cell>> grid;
  for (const auto& r : fused) {
    Cell& cell = grid[key_of(r.unit)][r.period];
    cell.conflicts += static_cast<double>(r.lag3_conflicts);
    cell.phase_area += static_cast<double>(r.phase) * r.area;
    cell.area += r.area;
  }

  std::map<std::string, SeriesPair> out;
  for (auto& [key, periods] : grid) {
    SeriesPair pair;
    pair.x.reserve(periods.size());
    pair.y.reserve(periods.size());
    for (auto& [period, cell] : periods) {
      pair.x.push_back(cell.conflicts);
      pair.y.push_back(cell.area > 0.0 ? cell.phase_area / cell.area : 0.0);
    }
    out.emplace(key, std::move(pair));
  }
  return out;
}

std::vector<CorrelationResult> correlate(std::span<const fuse::FusedRecord> fused, Level level,
                                         const CorrelateOptions& options, Exec exec) {
  const auto series = aggregate_level(fused, level);
  std::vector<const std::pair<const std::string, SeriesPair>*> items;
  items.reserve(series.size());
  for (const auto& kv : series) items.push_back(&kv);

  std::vector<std::optional<CorrelationResult>> slots(items.size());
  auto work = [&](size_t i) {
    const auto& [key, pair] = *items[i];
    if (pair.x.size() < 3) return;  // p-value undefined below 3 periods
    const auto rho = spearman(pair);
    if (!rho) return;  // constant series: reported as undefined, excluded
    CorrelationResult r;
    r.unit_key = key;
    r.level = level;
    r.rho = *rho;
    r.p_value = p_value(*rho, static_cast<int>(pair.x.size()));
    r.n = static_cast<int>(pair.x.size());
    r.low_confidence = r.n < options.confident_min_periods;
    slots[i] = std::move(r);
  };

  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (size_t i = 0; i < items.size(); ++i) work(i);
  } else {
    for (size_t i = 0; i < items.size(); ++i) work(i);
  }

  std::vector<CorrelationResult> out;
  const bool keep_all = options.include_all || options.alpha >= 1.0;
  for (auto& slot : slots) {
    if (!slot) continue;
    if (keep_all || slot->p_value < options.alpha) out.push_back(std::move(*slot));
  }
  return out;  // items were in map order, so output is key-sorted
}

void write_correlations_csv(std::ostream& out, std::span<const CorrelationResult> results) {
  csv::write_row(out, std::vector<std::string>{"unit_key", "level", "rho", "p_value", "n",
                                               "low_confidence"});
  for (const auto& r : results) {
    char rho_s[32], p_s[32];
    std::snprintf(rho_s, sizeof rho_s, "%.9f", r.rho);
    std::snprintf(p_s, sizeof p_s, "%.9g", r.p_value);
    csv::write_row(out, std::vector<std::string>{r.unit_key, std::string(to_string(r.level)),
                                                 rho_s, p_s, std::to_string(r.n),
                                                 r.low_confidence ? "1" : "0"});
  }
}

}  // namespace ipcfuse::stats
