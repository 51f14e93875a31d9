#include "vibrowalk/optimize.hpp"

#include "vibrowalk/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

namespace vibrowalk {

void OptBudget::validate() const {
  if (max_evals < 1) throw ConfigError("optimizer budget must allow at least one evaluation");
  if (lower.empty() || lower.size() != upper.size()) throw ConfigError("optimizer bounds must be non-empty and paired");
  if (!log_scale.empty() && log_scale.size() != lower.size())
    throw ConfigError("optimizer log-scale flags must match the bound count");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || lower[i] > upper[i])
      throw ConfigError("optimizer bounds must be finite with lower <= upper");
    if (is_log(i) && !(lower[i] > 0.0)) throw ConfigError("log-scaled bounds must be positive");
  }
  if (!(elite_fraction > 0.0 && elite_fraction <= 1.0)) throw ConfigError("elite fraction must be in (0, 1]");
  if (!(initial_spread > 0.0) || !(min_spread > 0.0)) throw ConfigError("optimizer spreads must be > 0");
  if (!(local_fraction >= 0.0 && local_fraction < 1.0)) throw ConfigError("local fraction must be in [0, 1)");
}

bool OptBudget::is_log(std::size_t i) const { return !log_scale.empty() && log_scale[i]; }

namespace {

struct Box {
  const OptBudget& b;

  bool fixed(std::size_t i) const { return b.lower[i] == b.upper[i]; }

  double to_unit(std::size_t i, double x) const {
    if (fixed(i)) return 0.5;
    double u = b.is_log(i) ? (std::log(x) - std::log(b.lower[i])) / (std::log(b.upper[i]) - std::log(b.lower[i]))
                           : (x - b.lower[i]) / (b.upper[i] - b.lower[i]);
    return std::clamp(u, 0.0, 1.0);
  }

  double from_unit(std::size_t i, double u) const {
    if (fixed(i)) return b.lower[i];
    u = std::clamp(u, 0.0, 1.0);
    double x = b.is_log(i) ? std::exp(std::log(b.lower[i]) + u * (std::log(b.upper[i]) - std::log(b.lower[i])))
                           : b.lower[i] + u * (b.upper[i] - b.lower[i]);
    // exp/log round trips can step outside by an ulp
    return std::clamp(x, b.lower[i], b.upper[i]);
  }
};

// Reflects into [0, 1].
double reflect(double u) {
  u = std::fmod(std::abs(u), 2.0);
  return u > 1.0 ? 2.0 - u : u;
}

}  // namespace

namespace {

// Evaluates unit-box candidates in parallel and appends them to the trace.
class Evaluator {
 public:
  Evaluator(const Objective& f, const OptBudget& b, OptResult& r) : f_(f), b_(b), box_{b}, r_(r) {}

  int remaining() const { return b_.max_evals - static_cast<int>(r_.trace.size()); }

  std::vector<double> run(const std::vector<std::vector<double>>& units) {
    const std::size_t n = b_.dim(), base = r_.trace.size();
    std::vector<Evaluation> evals(units.size());
    for (std::size_t k = 0; k < units.size(); ++k) {
      evals[k].id = static_cast<int>(base + k);
      evals[k].x.resize(n);
      for (std::size_t i = 0; i < n; ++i) evals[k].x[i] = box_.from_unit(i, units[k][i]);
    }
    parallel_for(evals.size(), b_.jobs, [&](std::size_t k) {
      Evaluation& e = evals[k];
      try {
        e.value = f_(e.x);
        if (!std::isfinite(e.value)) {
          e.ok = false;
          e.message = "non-finite objective";
        }
      } catch (const std::exception& ex) {
        e.ok = false;
        e.message = ex.what();
      }
      if (!e.ok) e.value = std::numeric_limits<double>::infinity();
    });
    std::vector<double> values;
    for (auto& e : evals) {
      if (e.ok && e.value < r_.best_value) {
        r_.best_value = e.value;
        r_.best_x = e.x;
        r_.best_id = e.id;
        best_unit_ = units[static_cast<std::size_t>(e.id) - base];
      }
      values.push_back(e.value);
      r_.trace.push_back(std::move(e));
    }
    return values;
  }

  double one(const std::vector<double>& u) { return run({u}).front(); }
  double best_value() const { return r_.best_value; }
  const std::vector<double>& best_unit() const { return best_unit_; }

 private:
  const Objective& f_;
  const OptBudget& b_;
  Box box_;
  OptResult& r_;
  std::vector<double> best_unit_;
};

// Bounded Nelder-Mead over the free dimensions with dimension-adaptive
// coefficients (Gao and Han); points are clamped to the box.
void refine(Evaluator& ev, const Box& box, std::vector<double> x0, double step) {
  const std::size_t n = x0.size();
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < n; ++i)
    if (!box.fixed(i)) free.push_back(i);
  if (free.empty()) return;
  const std::size_t m = free.size();
  const double dm = std::max(2.0, static_cast<double>(m));  // standard coefficients at n <= 2
  const double expand = 1.0 + 2.0 / dm, contract = 0.75 - 0.5 / dm, shrink = 1.0 - 1.0 / dm;
  auto clamp01 = [](std::vector<double> u) {
    for (double& v : u) v = std::clamp(v, 0.0, 1.0);
    return u;
  };
  auto affine = [&](const std::vector<double>& a, const std::vector<double>& b, double t) {
    std::vector<double> u = a;  // a + t (b - a)
    for (std::size_t i : free) u[i] = a[i] + t * (b[i] - a[i]);
    return clamp01(u);
  };

  double f0 = ev.best_value();  // x0 starts as the incumbent
  while (ev.remaining() > 0 && step > 1e-9) {
    std::vector<std::vector<double>> pts{x0};
    for (std::size_t i : free) {
      std::vector<double> u = x0;
      u[i] = x0[i] + step <= 1.0 ? x0[i] + step : x0[i] - step;
      pts.push_back(clamp01(u));
    }
    std::vector<std::vector<double>> fresh(pts.begin() + 1, pts.end());
    fresh.resize(std::min<std::size_t>(m, static_cast<std::size_t>(ev.remaining())));
    const auto fv = ev.run(fresh);
    if (fv.size() < m) return;
    std::vector<double> values{f0};
    values.insert(values.end(), fv.begin(), fv.end());
    std::vector<std::size_t> order(m + 1);
    bool collapsed = false;
    while (ev.remaining() > 0) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
      const std::size_t best = order.front(), worst = order.back(), second = order[m - 1];
      double size = 0.0;
      for (std::size_t k = 0; k <= m; ++k)
        for (std::size_t i : free) size = std::max(size, std::abs(pts[k][i] - pts[best][i]));
      if (size < 1e-3 * step) {
        collapsed = true;
        x0 = pts[best];
        f0 = values[best];
        break;
      }
      std::vector<double> c(n, 0.0);
      for (std::size_t k = 0; k <= m; ++k)
        if (k != worst)
          for (std::size_t i = 0; i < n; ++i) c[i] += pts[k][i] / static_cast<double>(m);
      for (std::size_t i = 0; i < n; ++i)
        if (box.fixed(i)) c[i] = pts[best][i];
      const auto xr = affine(c, pts[worst], -1.0);
      const double fr = ev.one(xr);
      if (fr < values[best]) {
        if (ev.remaining() == 0) break;
        const auto xe = affine(c, pts[worst], -expand);
        const double fe = ev.one(xe);
        if (fe < fr) pts[worst] = xe, values[worst] = fe;
        else pts[worst] = xr, values[worst] = fr;
      } else if (fr < values[second]) {
        pts[worst] = xr, values[worst] = fr;
      } else {
        if (ev.remaining() == 0) break;
        const bool outside = fr < values[worst];
        const auto xc = outside ? affine(c, xr, contract) : affine(c, pts[worst], contract);
        const double fc = ev.one(xc);
        if (fc < std::min(fr, values[worst])) {
          pts[worst] = xc, values[worst] = fc;
        } else {
          std::vector<std::vector<double>> shrunk;
          std::vector<std::size_t> idx;
          for (std::size_t k = 0; k <= m; ++k)
            if (k != best) shrunk.push_back(affine(pts[best], pts[k], shrink)), idx.push_back(k);
          shrunk.resize(std::min<std::size_t>(shrunk.size(), static_cast<std::size_t>(ev.remaining())));
          const auto sv = ev.run(shrunk);
          for (std::size_t j = 0; j < sv.size(); ++j) pts[idx[j]] = shrunk[j], values[idx[j]] = sv[j];
        }
      }
    }
    if (!collapsed) return;
    step *= 0.25;
  }
}

}  // namespace

OptResult minimize(const Objective& f, const OptBudget& budget, const std::optional<std::vector<double>>& start) {
  budget.validate();
  const std::size_t n = budget.dim();
  const Box box{budget};
  if (start && start->size() != n) throw ConfigError("optimizer start point has the wrong dimension");

  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < n; ++i)
    if (!box.fixed(i)) free.push_back(i);
  const auto d = static_cast<Eigen::Index>(free.size());

  std::vector<double> x0(n);
  for (std::size_t i = 0; i < n; ++i) x0[i] = start ? box.to_unit(i, (*start)[i]) : 0.5;

  OptResult result;
  result.seed = budget.seed;
  result.best_value = std::numeric_limits<double>::infinity();
  result.trace.reserve(static_cast<std::size_t>(budget.max_evals));
  Evaluator ev(f, budget, result);
  ev.one(x0);

  const int global_evals =
      std::max(1, budget.max_evals - static_cast<int>(std::floor(budget.local_fraction * budget.max_evals)));

  double local_step = 0.05;
  if (d > 0) {
    // CMA-ES over the free dimensions (Hansen's default constants).
    const double dn = static_cast<double>(d);
    int lambda = budget.population;
    if (lambda <= 0) lambda = std::max(8, static_cast<int>(std::lround(4.0 + 3.0 * std::log(dn))));
    const int mu = std::clamp(static_cast<int>(std::floor(budget.elite_fraction * lambda)), 1, lambda);
    Eigen::VectorXd w(mu);
    for (int k = 0; k < mu; ++k) w[k] = std::log(mu + 0.5) - std::log(k + 1.0);
    w /= w.sum();
    const double mueff = 1.0 / w.squaredNorm();
    const double cs = (mueff + 2.0) / (dn + mueff + 5.0);
    const double ds = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (dn + 1.0)) - 1.0) + cs;
    const double cc = (4.0 + mueff / dn) / (dn + 4.0 + 2.0 * mueff / dn);
    const double c1 = 2.0 / ((dn + 1.3) * (dn + 1.3) + mueff);
    const double cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((dn + 2.0) * (dn + 2.0) + mueff));
    const double chi = std::sqrt(dn) * (1.0 - 1.0 / (4.0 * dn) + 1.0 / (21.0 * dn * dn));

    Eigen::VectorXd mean(d), ps = Eigen::VectorXd::Zero(d), pc = Eigen::VectorXd::Zero(d);
    for (Eigen::Index j = 0; j < d; ++j) mean[j] = x0[free[static_cast<std::size_t>(j)]];
    Eigen::MatrixXd C = Eigen::MatrixXd::Identity(d, d), B = C;
    Eigen::VectorXd D = Eigen::VectorXd::Ones(d);
    double sigma = budget.initial_spread / std::sqrt(dn);

    std::mt19937_64 rng(budget.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int gen = 1; static_cast<int>(result.trace.size()) < global_evals; ++gen) {
      const int batch = std::min(lambda, global_evals - static_cast<int>(result.trace.size()));
      std::vector<std::vector<double>> units(batch, x0);
      Eigen::MatrixXd Y(d, batch);
      for (int k = 0; k < batch; ++k) {
        Eigen::VectorXd z(d);
        for (Eigen::Index j = 0; j < d; ++j) z[j] = normal(rng);
        const Eigen::VectorXd x = mean + sigma * (B * D.asDiagonal() * z);
        for (Eigen::Index j = 0; j < d; ++j) {
          const double u = reflect(x[j]);
          units[k][free[static_cast<std::size_t>(j)]] = u;
          Y(j, k) = (u - mean[j]) / sigma;  // step of the repaired point
        }
      }
      const std::vector<double> values = ev.run(units);
      if (batch < lambda) break;

      std::vector<int> order(batch);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return values[a] < values[b]; });
      if (!std::isfinite(values[order[0]])) continue;

      Eigen::VectorXd yw = Eigen::VectorXd::Zero(d);
      for (int k = 0; k < mu; ++k) yw += w[k] * Y.col(order[k]);
      mean += sigma * yw;
      for (Eigen::Index j = 0; j < d; ++j) mean[j] = std::clamp(mean[j], 0.0, 1.0);

      const Eigen::VectorXd inv_sqrt_yw = B * (B.transpose() * yw).cwiseQuotient(D);
      ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mueff) * inv_sqrt_yw;
      const double hs_norm = ps.norm() / std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * gen));
      const bool hs = hs_norm < (1.4 + 2.0 / (dn + 1.0)) * chi;
      pc = (1.0 - cc) * pc + (hs ? std::sqrt(cc * (2.0 - cc) * mueff) : 0.0) * yw;

      Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(d, d);
      for (int k = 0; k < mu; ++k) rank_mu += w[k] * Y.col(order[k]) * Y.col(order[k]).transpose();
      C = (1.0 - c1 - cmu) * C + c1 * (pc * pc.transpose() + (hs ? 0.0 : cc * (2.0 - cc)) * C) + cmu * rank_mu;
      C = 0.5 * (C + C.transpose());
      sigma *= std::exp((cs / ds) * (ps.norm() / chi - 1.0));
      sigma = std::clamp(sigma, budget.min_spread, 1.0);

      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(C);
      B = eig.eigenvectors();
      D = eig.eigenvalues().cwiseMax(1e-20).cwiseSqrt();
    }
    local_step = std::clamp(2.0 * sigma * D.maxCoeff(), 0.02, 0.25);
  }

  if (ev.remaining() > 0 && result.best_id >= 0) refine(ev, box, ev.best_unit(), local_step);

  if (result.best_id < 0) throw Error("optimizer: all " + std::to_string(result.trace.size()) + " evaluations failed");
  return result;
}

}  // namespace vibrowalk
