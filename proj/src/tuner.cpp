#include "wopt/tuner.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace wopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sanitize(double v) { return std::isnan(v) ? kInf : v; }

void check_options(const SearchOptions& o) {
  if (!(o.initial_mesh > 0.0)) {
    throw std::invalid_argument("initial_mesh must be positive");
  }
  if (!(o.contraction > 0.0 && o.contraction < 1.0)) {
    throw std::invalid_argument("contraction must lie in (0, 1)");
  }
  if (!(o.expansion >= 1.0)) {
    throw std::invalid_argument("expansion must be >= 1");
  }
  if (!(o.mesh_tol > 0.0)) {
    throw std::invalid_argument("mesh_tol must be positive");
  }
  if (o.max_evals < 1) {
    throw std::invalid_argument("max_evals must be >= 1");
  }
  if (o.jobs < 1) {
    throw std::invalid_argument("jobs must be >= 1");
  }
}

/// Evaluates f at each point, in order, running up to `jobs` calls
/// concurrently. The returned values follow the input order regardless of
/// completion order.
std::vector<double> evaluate_batch(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const std::vector<Eigen::VectorXd>& points, int jobs) {
  std::vector<double> values(points.size());
  if (jobs <= 1) {
    for (std::size_t i = 0; i < points.size(); ++i) values[i] = sanitize(f(points[i]));
    return values;
  }
  std::size_t begin = 0;
  while (begin < points.size()) {
    const std::size_t end = std::min(points.size(), begin + static_cast<std::size_t>(jobs));
    std::vector<std::future<double>> batch;
    batch.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      batch.push_back(std::async(std::launch::async, [&f, &points, i] { return f(points[i]); }));
    }
    for (std::size_t i = begin; i < end; ++i) values[i] = sanitize(batch[i - begin].get());
    begin = end;
  }
  return values;
}

double rho_from_value(double value, const PepSetting& setting) {
  const double r2 = setting.init_bound * setting.init_bound;
  return std::pow(std::max(value, 0.0) / r2, 1.0 / (2.0 * setting.horizon));
}

double tau_from_rho(double rho) {
  if (rho >= 1.0) return kInf;
  if (rho <= 0.0) return 0.0;
  return 1.0 / std::log(1.0 / rho);
}

}  // namespace

SearchResult pattern_search(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x0, const SearchOptions& opts) {
  check_options(opts);
  const int d = static_cast<int>(x0.size());

  SearchResult res;
  res.x = x0;
  res.value = sanitize(f(x0));
  res.evaluations = 1;
  if (std::isinf(res.value)) {
    throw DomainError("pattern search started at a point with infinite objective");
  }

  double mesh = opts.initial_mesh;
  res.trace.push_back({res.x, res.value, mesh});

  while (mesh >= opts.mesh_tol && res.evaluations < opts.max_evals && d > 0) {
    const int budget = opts.max_evals - res.evaluations;
    const int count = std::min(2 * d, budget);
    std::vector<Eigen::VectorXd> poll;
    poll.reserve(count);
    for (int k = 0; k < count; ++k) {
      Eigen::VectorXd p = res.x;
      p(k / 2) += (k % 2 == 0 ? mesh : -mesh);
      poll.push_back(std::move(p));
    }
    const std::vector<double> values = evaluate_batch(f, poll, opts.jobs);
    res.evaluations += count;

    int best = -1;
    for (int k = 0; k < count; ++k) {
      if (values[k] < res.value && (best < 0 || values[k] < values[best])) best = k;
    }
    if (best >= 0) {
      res.x = poll[best];
      res.value = values[best];
      res.trace.push_back({res.x, res.value, mesh});
      mesh *= opts.expansion;
    } else {
      mesh *= opts.contraction;
    }
  }
  return res;
}

AlphaResult tune_alpha(const PepSetting& setting, const AveragingMatrix& W, double lo,
                       double hi, int grid_points, const SearchOptions& opts) {
  check_options(opts);
  if (!(lo > 0.0) || !(hi > lo)) {
    throw std::invalid_argument("step-size grid needs 0 < lo < hi");
  }
  if (grid_points < 2) {
    throw std::invalid_argument("step-size grid needs at least 2 points");
  }
  if (slem(W) >= 1.0 - 1e-9) {
    throw DomainError("averaging matrix does not contract (slem >= 1); "
                      "no step-size can help");
  }

  const double L = setting.fclass.L;
  const auto objective = [&](double log_alpha) {
    return sanitize(evaluate(setting, W, std::exp(log_alpha), opts.solver).value);
  };

  AlphaResult out;
  const double zlo = std::log(lo / L);
  const double zhi = std::log(hi / L);
  int best = -1;
  double best_value = kInf;
  std::vector<double> grid(grid_points);
  for (int j = 0; j < grid_points; ++j) {
    grid[j] = zlo + (zhi - zlo) * j / (grid_points - 1);
    const double v = objective(grid[j]);
    ++out.evaluations;
    if (v < best_value) {
      best_value = v;
      best = j;
    }
  }
  if (best < 0 || std::isinf(best_value)) {
    throw DomainError("no step-size in the scan produced a finite worst case");
  }
  if (setting.criterion == Criterion::RateIterates &&
      best_value >= setting.init_bound * setting.init_bound) {
    throw DomainError("no step-size in the scan is contractive for these weights");
  }

  SearchOptions line = opts;
  line.restarts.clear();
  const auto f1 = [&](const Eigen::VectorXd& z) { return objective(z(0)); };
  const SearchResult sr = pattern_search(f1, Eigen::VectorXd::Constant(1, grid[best]), line);
  out.evaluations += sr.evaluations;

  out.alpha = std::exp(sr.x(0));
  out.value = sr.value;
  out.pep = evaluate(setting, W, out.alpha, opts.solver);
  ++out.evaluations;
  return out;
}

TuneResult tune_weights(const PepSetting& setting, const Graph& g,
                        const SearchOptions& opts, bool orbit_tied) {
  check_options(opts);
  if (!is_connected(g)) {
    throw DomainError("graph is not connected; no weights can average it");
  }

  OrbitPartition part;
  int r = g.edge_count();
  if (orbit_tied) {
    part = edge_orbits(g);
    r = part.orbit_count;
  }
  const auto expand = [&](const Eigen::VectorXd& zw) -> Eigen::VectorXd {
    return orbit_tied ? expand_orbit_values(part, zw) : zw;
  };
  const auto objective = [&](const Eigen::VectorXd& z) {
    const AveragingMatrix W = averaging_from_weights(g, expand(z.head(r)));
    return sanitize(evaluate(setting, W, std::exp(z(r)), opts.solver).value);
  };

  TuneResult out;
  std::vector<Eigen::VectorXd> starts;
  if (!opts.restarts.empty()) {
    for (const Eigen::VectorXd& p : opts.restarts) {
      if (p.size() != r + 1) {
        throw std::invalid_argument("restart point has " + std::to_string(p.size()) +
                                    " entries; expected " + std::to_string(r + 1) +
                                    " (weight variables plus step-size)");
      }
      if (!(p(r) > 0.0)) {
        throw std::invalid_argument("restart step-size must be positive");
      }
      Eigen::VectorXd z = p;
      z(r) = std::log(p(r));
      starts.push_back(std::move(z));
    }
  } else {
    for (HeuristicId id : {HeuristicId::MinSlem, HeuristicId::Metropolis}) {
      try {
        const HeuristicResult hr = run_heuristic(id, g);
        const AlphaResult ar = tune_alpha(setting, hr.M, 1e-3, 2.0, 25, opts);
        out.evaluations += ar.evaluations;
        const Eigen::VectorXd& we = *hr.M.w;
        Eigen::VectorXd z(r + 1);
        if (orbit_tied) {
          for (int e = 0; e < g.edge_count(); ++e) z(part.orbit_of_edge[e]) = we(e);
        } else {
          z.head(r) = we;
        }
        z(r) = std::log(ar.alpha);
        starts.push_back(std::move(z));
      } catch (const DomainError&) {
        // This seed has no contractive step-size; try the next one.
      }
    }
  }

  bool found = false;
  SearchResult winner;
  for (const Eigen::VectorXd& z : starts) {
    const double v0 = objective(z);
    ++out.evaluations;
    if (std::isinf(v0)) continue;
    SearchResult sr = pattern_search(objective, z, opts);
    out.evaluations += sr.evaluations;
    if (!found || sr.value < winner.value) {
      winner = std::move(sr);
      found = true;
    }
  }
  if (!found) {
    throw DomainError("no restart point produced a finite worst case; "
                      "supply restarts with contractive weights");
  }

  out.w = expand(winner.x.head(r));
  out.alpha = std::exp(winner.x(r));
  out.pep = evaluate(setting, averaging_from_weights(g, out.w), out.alpha, opts.solver);
  ++out.evaluations;
  out.value = out.pep.value;
  out.trace = std::move(winner.trace);
  for (SearchStep& step : out.trace) {
    Eigen::VectorXd p(r + 1);
    p.head(r) = step.point.head(r);
    p(r) = std::exp(step.point(r));
    step.point = std::move(p);
  }
  return out;
}

CompareResult compare(const PepSetting& setting, const Graph& g, const SearchOptions& opts) {
  check_options(opts);
  CompareResult out;
  out.setting = setting;
  out.graph = g;

  const bool has_rate = setting.criterion == Criterion::RateIterates &&
                        setting.algorithm != AlgorithmId::Extra;
  const auto fill_rate = [&](CompareRow& row) {
    if (!has_rate) {
      row.rho = std::numeric_limits<double>::quiet_NaN();
      row.tau = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    row.rho = rho_from_value(row.value, setting);
    row.tau = tau_from_rho(row.rho);
  };
  const auto spectrum_tail = [&](const Eigen::MatrixXd& W) -> Eigen::VectorXd {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W);
    const Eigen::VectorXd desc = es.eigenvalues().reverse();
    return desc.tail(desc.size() - 1);
  };

  const OrbitPartition part = edge_orbits(g);
  std::vector<Eigen::VectorXd> seeds;
  for (HeuristicId id : all_heuristics()) {
    CompareRow row;
    row.name = to_string(id);
    try {
      const HeuristicResult hr = run_heuristic(id, g, {.solver = opts.solver});
      const AlphaResult ar = tune_alpha(setting, hr.M, 1e-3, 2.0, 25, opts);
      row.ok = true;
      row.w = *hr.M.w;
      row.alpha = ar.alpha;
      row.value = ar.value;
      fill_rate(row);
      row.eigs = spectrum_tail(hr.M.W);

      Eigen::VectorXd seed(part.orbit_count + 1);
      for (int e = 0; e < g.edge_count(); ++e) seed(part.orbit_of_edge[e]) = row.w(e);
      seed(part.orbit_count) = row.alpha;
      seeds.push_back(std::move(seed));
    } catch (const std::exception& e) {
      row.ok = false;
      row.note = e.what();
    }
    out.rows.push_back(std::move(row));
  }

  CompareRow row;
  row.name = "optimal";
  try {
    SearchOptions tuned = opts;
    tuned.restarts = seeds;
    const TuneResult tr = tune_weights(setting, g, tuned, true);
    row.ok = true;
    row.w = tr.w;
    row.alpha = tr.alpha;
    row.value = tr.value;
    fill_rate(row);
    row.eigs = spectrum_tail(averaging_from_weights(g, tr.w).W);
  } catch (const std::exception& e) {
    row.ok = false;
    row.note = e.what();
  }
  out.rows.push_back(std::move(row));
  return out;
}

std::string to_csv(const CompareResult& result) {
  std::ostringstream os;
  os.precision(12);
  os << "heuristic,alpha,E,rho,tau";
  for (int i = 2; i <= result.graph.n; ++i) os << ",eig_" << i;
  os << "\n";
  const auto cell = [&os](double v) {
    os << ",";
    if (!std::isnan(v)) os << v;
  };
  for (const CompareRow& row : result.rows) {
    os << row.name;
    if (row.ok) {
      cell(row.alpha);
      cell(row.value);
      cell(row.rho);
      cell(row.tau);
      for (int i = 0; i < row.eigs.size(); ++i) cell(row.eigs(i));
    } else {
      for (int i = 0; i < 4 + result.graph.n - 1; ++i) os << ",";
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace wopt
