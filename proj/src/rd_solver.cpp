#include "mdimkit/rd_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mdimkit/kernels.hpp"

namespace mdk {

std::string rd_status_name(RDStatus s) {
  switch (s) {
    case RDStatus::Ok:
      return "ok";
    case RDStatus::Trivial:
      return "trivial";
    case RDStatus::Infeasible:
      return "infeasible";
    case RDStatus::NotConverged:
      return "not_converged";
  }
  return "unknown";
}

double channel_information(std::span<const double> p, std::span<const double> w, std::size_t ny) {
  const std::size_t nx = p.size();
  if (w.size() != nx * ny) throw std::invalid_argument("channel has the wrong size");
  std::vector<double> out(ny, 0.0);
  for (std::size_t x = 0; x < nx; ++x) {
    if (p[x] > 0.0) kernels::axpy(p[x], w.subspan(x * ny, ny), out);
  }
  double i = 0.0;
  for (std::size_t x = 0; x < nx; ++x) {
    if (p[x] <= 0.0) continue;
    const double* wx = w.data() + x * ny;
    for (std::size_t y = 0; y < ny; ++y) {
      if (wx[y] > 0.0) i += p[x] * wx[y] * std::log(wx[y] / out[y]);
    }
  }
  return std::max(i, 0.0);
}

namespace {

// Source restricted to its support.
struct Problem {
  std::vector<double> p;
  std::vector<std::size_t> rows;  // original row of each support point
  std::vector<double> rho;        // nx x ny
  std::vector<double> rho_min;
  std::size_t nx = 0;
  std::size_t ny = 0;
  double base = 0.0;  // sum_x p(x) min_y rho(x, y)
};

struct Point {
  double s = 0.0;
  std::vector<double> q;  // output weights defining the channel q(y) K(x,y) / Z(x)
  double distortion = 0.0;
  double lower = -std::numeric_limits<double>::infinity();  // dual bound at the target
  int iterations = 0;
};

class BlahutArimoto {
 public:
  explicit BlahutArimoto(const Problem& pr)
      : pr_(pr), k_(pr.nx * pr.ny), cur_(pr), trial_(pr) {}

  // Blahut-Arimoto at multiplier s, accelerated by squared extrapolation
  // (SQUAREM); an extrapolated step is kept only when it does not decrease
  // sum_x p(x) log Z(x), the objective the plain update increases.
  Point run(double s, std::vector<double> q, double target, double tol, int cap) {
    const std::size_t nx = pr_.nx, ny = pr_.ny;
    for (std::size_t x = 0; x < nx; ++x) {
      const double* r = pr_.rho.data() + x * ny;
      double* k = k_.data() + x * ny;
      for (std::size_t y = 0; y < ny; ++y) k[y] = std::exp(-s * (r[y] - pr_.rho_min[x]));
    }
    // Warm starts may carry weights that have collapsed to zero; keep every
    // codeword reachable.
    const double start_floor = 1e-12 / static_cast<double>(ny);
    for (double& v : q) v = std::max(v, start_floor);
    normalize(q);

    Point pt;
    pt.s = s;
    int evals = 0;
    std::vector<double> q1(ny), q2(ny), qx(ny);
    Eval e1(pr_), e2(pr_);
    evaluate(q, cur_);
    ++evals;
    while (cur_.gap >= tol && evals < cap) {
      step(q, cur_, q1);
      evaluate(q1, e1);
      ++evals;
      if (e1.gap < tol) {
        q.swap(q1);
        std::swap(cur_, e1);
        break;
      }
      step(q1, e1, q2);
      evaluate(q2, e2);
      ++evals;
      double rr = 0.0, vv = 0.0;
      for (std::size_t y = 0; y < ny; ++y) {
        const double r = q1[y] - q[y];
        const double v = q2[y] - 2.0 * q1[y] + q[y];
        rr += r * r;
        vv += v * v;
      }
      bool accepted = false;
      if (vv > 0.0 && e2.gap >= tol) {
        const double alpha = std::min(-std::sqrt(rr / vv), -1.0);
        for (std::size_t y = 0; y < ny; ++y) {
          const double r = q1[y] - q[y];
          const double v = q2[y] - 2.0 * q1[y] + q[y];
          qx[y] = std::max(q[y] - 2.0 * alpha * r + alpha * alpha * v, 1e-2 * q[y]);
        }
        normalize(qx);
        evaluate(qx, trial_);
        ++evals;
        if (trial_.objective >= e2.objective) {
          q.swap(qx);
          std::swap(cur_, trial_);
          accepted = true;
        }
      }
      if (!accepted) {
        q.swap(q2);
        std::swap(cur_, e2);
      }
      // Codewords whose weight has collapsed while c(y) > 1 would take
      // forever to recover multiplicatively.
      bool revived = false;
      for (std::size_t y = 0; y < ny; ++y) {
        if (cur_.c[y] > 1.0 + tol && q[y] < start_floor) {
          q[y] = start_floor;
          revived = true;
        }
      }
      if (revived) {
        normalize(q);
        evaluate(q, cur_);
        ++evals;
      }
    }
    pt.iterations = evals;

    double dist = 0.0;
    std::vector<double> tmp(ny);
    for (std::size_t x = 0; x < nx; ++x) {
      const double* k = k_.data() + x * ny;
      const double* r = pr_.rho.data() + x * ny;
      for (std::size_t y = 0; y < ny; ++y) tmp[y] = k[y] * r[y];
      dist += pr_.p[x] * kernels::dot(tmp, q) / cur_.z[x];
    }
    pt.distortion = dist;
    pt.lower = -s * (target - pr_.base) - cur_.objective - cur_.log_max_c;
    pt.q = std::move(q);
    return pt;
  }

  // Explicit channel of a point, nx x ny.
  std::vector<double> channel(const Point& pt) const {
    const std::size_t nx = pr_.nx, ny = pr_.ny;
    std::vector<double> w(nx * ny);
    for (std::size_t x = 0; x < nx; ++x) {
      const double* r = pr_.rho.data() + x * ny;
      double z = 0.0;
      for (std::size_t y = 0; y < ny; ++y) {
        w[x * ny + y] = pt.q[y] * std::exp(-pt.s * (r[y] - pr_.rho_min[x]));
        z += w[x * ny + y];
      }
      for (std::size_t y = 0; y < ny; ++y) w[x * ny + y] /= z;
    }
    return w;
  }

 private:
  struct Eval {
    explicit Eval(const Problem& pr) : z(pr.nx), c(pr.ny) {}
    std::vector<double> z;
    std::vector<double> c;
    double objective = 0.0;  // sum_x p(x) log Z(x)
    double log_max_c = 0.0;
    double gap = 0.0;        // log max c - sum_y q(y) c(y) log c(y)
  };

  // Weights never reach exact zero so every row keeps a defined channel.
  static constexpr double kFloor = 1e-250;

  static void normalize(std::vector<double>& q) {
    for (double& v : q) v = std::max(v, kFloor);
    const double s = std::accumulate(q.begin(), q.end(), 0.0);
    for (double& v : q) v /= s;
  }

  void evaluate(const std::vector<double>& q, Eval& e) const {
    const std::size_t nx = pr_.nx, ny = pr_.ny;
    std::fill(e.c.begin(), e.c.end(), 0.0);
    e.objective = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      const std::span<const double> k(k_.data() + x * ny, ny);
      e.z[x] = kernels::dot(k, q);
      e.objective += pr_.p[x] * std::log(e.z[x]);
      kernels::axpy(pr_.p[x] / e.z[x], k, e.c);
    }
    e.log_max_c = std::log(kernels::max_value(e.c));
    double avg = 0.0;
    for (std::size_t y = 0; y < ny; ++y) avg += q[y] * e.c[y] * std::log(e.c[y]);
    e.gap = e.log_max_c - avg;
  }

  static void step(const std::vector<double>& q, const Eval& e, std::vector<double>& out) {
    for (std::size_t y = 0; y < q.size(); ++y) out[y] = q[y] * e.c[y];
    normalize(out);
  }

  const Problem& pr_;
  std::vector<double> k_;
  Eval cur_;
  Eval trial_;
};

double channel_distortion(const Problem& pr, std::span<const double> w) {
  double d = 0.0;
  for (std::size_t x = 0; x < pr.nx; ++x) {
    d += pr.p[x] * kernels::dot(w.subspan(x * pr.ny, pr.ny),
                                std::span<const double>(pr.rho.data() + x * pr.ny, pr.ny));
  }
  return d;
}

// Deterministic map to the nearest codeword (lowest index on ties).
std::vector<double> nearest_channel(const Problem& pr) {
  std::vector<double> w(pr.nx * pr.ny, 0.0);
  for (std::size_t x = 0; x < pr.nx; ++x) {
    const double* r = pr.rho.data() + x * pr.ny;
    w[x * pr.ny + static_cast<std::size_t>(std::min_element(r, r + pr.ny) - r)] = 1.0;
  }
  return w;
}

RDResult finish(const Problem& pr, std::vector<double> w, RDResult r, const RDOptions& opt) {
  r.distortion = channel_distortion(pr, w);
  r.rate = channel_information(pr.p, w, pr.ny);
  r.gap = std::max(r.rate - r.lower_bound, 0.0);
  if (r.status == RDStatus::Ok && r.gap > opt.gap_tol) r.status = RDStatus::NotConverged;
  if (opt.keep_channel) r.channel = std::move(w);
  return r;
}

RDResult solve_support(const Problem& pr, double target, const RDOptions& opt);

}  // namespace

RDResult solve_rd(std::span<const double> p, std::span<const double> rho, std::size_t ny, double target,
                  const RDOptions& opt) {
  const std::size_t nx_full = p.size();
  if (nx_full == 0 || ny == 0) throw std::invalid_argument("source and codebook must be nonempty");
  if (rho.size() != nx_full * ny) throw std::invalid_argument("distortion matrix has the wrong size");
  if (!(target > 0.0)) throw std::invalid_argument("distortion target must be positive");

  Problem pr;
  pr.ny = ny;
  for (std::size_t x = 0; x < nx_full; ++x) {
    if (p[x] < 0.0) throw std::invalid_argument("source probabilities must be nonnegative");
    if (p[x] == 0.0) continue;
    pr.p.push_back(p[x]);
    pr.rows.push_back(x);
    pr.rho.insert(pr.rho.end(), rho.begin() + static_cast<std::ptrdiff_t>(x * ny),
                  rho.begin() + static_cast<std::ptrdiff_t>((x + 1) * ny));
  }
  pr.nx = pr.p.size();
  if (pr.nx == 0) throw std::invalid_argument("source has no mass");
  pr.rho_min.resize(pr.nx);
  for (std::size_t x = 0; x < pr.nx; ++x) {
    const double* r = pr.rho.data() + x * ny;
    pr.rho_min[x] = *std::min_element(r, r + ny);
    pr.base += pr.p[x] * pr.rho_min[x];
  }

  RDResult r = solve_support(pr, target, opt);
  if (opt.keep_channel && !r.channel.empty()) {
    // Rows outside the support get the nearest codeword.
    std::vector<double> full(nx_full * ny, 0.0);
    std::size_t i = 0;
    for (std::size_t x = 0; x < nx_full; ++x) {
      if (i < pr.nx && pr.rows[i] == x) {
        std::copy_n(r.channel.begin() + static_cast<std::ptrdiff_t>(i * ny), ny,
                    full.begin() + static_cast<std::ptrdiff_t>(x * ny));
        ++i;
      } else {
        const double* row = rho.data() + x * ny;
        full[x * ny + static_cast<std::size_t>(std::min_element(row, row + ny) - row)] = 1.0;
      }
    }
    r.channel = std::move(full);
  }
  return r;
}

namespace {

RDResult solve_support(const Problem& pr, double target, const RDOptions& opt) {
  const std::size_t ny = pr.ny;
  RDResult r;
  r.eps = target;
  r.target = target;

  if (pr.base > target) {
    r.status = RDStatus::Infeasible;
    r.rate = std::numeric_limits<double>::infinity();
    r.lower_bound = r.rate;
    r.distortion = pr.base;
    return r;
  }

  // A constant codeword meeting the target gives rate 0.
  {
    std::vector<double> e(ny, 0.0);
    for (std::size_t x = 0; x < pr.nx; ++x) {
      kernels::axpy(pr.p[x], std::span<const double>(pr.rho.data() + x * ny, ny), e);
    }
    const auto y0 = static_cast<std::size_t>(std::min_element(e.begin(), e.end()) - e.begin());
    if (e[y0] <= target) {
      std::vector<double> w(pr.nx * ny, 0.0);
      for (std::size_t x = 0; x < pr.nx; ++x) w[x * ny + y0] = 1.0;
      r.status = RDStatus::Trivial;
      r.lower_bound = 0.0;
      return finish(pr, std::move(w), r, opt);
    }
  }

  BlahutArimoto ba(pr);
  const double s_max = opt.s_max_factor / target;
  std::vector<double> uniform(ny, 1.0 / static_cast<double>(ny));

  Point hi = ba.run(s_max, uniform, target, opt.search_tol, opt.search_inner);
  r.iterations += hi.iterations;
  r.outer_iterations = 1;

  if (hi.distortion > target) {
    // Even s_max misses the target: time-share with the nearest-codeword map,
    // which meets it because base <= target.
    std::vector<double> wa = ba.channel(hi);
    std::vector<double> wb = nearest_channel(pr);
    const double da = channel_distortion(pr, wa), db = channel_distortion(pr, wb);
    const double lam = da > db ? std::clamp((target - db) / (da - db), 0.0, 1.0) * (1.0 - 1e-12) : 0.0;
    for (std::size_t i = 0; i < wa.size(); ++i) wa[i] = lam * wa[i] + (1.0 - lam) * wb[i];
    r.s = s_max;
    r.lower_bound = std::max(hi.lower, 0.0);
    r.status = RDStatus::NotConverged;
    return finish(pr, std::move(wa), r, opt);
  }

  // Illinois regula falsi on D(s) - target over [lo_s, hi.s], with a
  // bisection step whenever the bracket fails to halve in three steps.
  double lo_s = 0.0;
  double f_lo = 0.0;
  {
    std::vector<double> e(ny, 0.0);
    for (std::size_t x = 0; x < pr.nx; ++x) {
      kernels::axpy(pr.p[x], std::span<const double>(pr.rho.data() + x * ny, ny), e);
    }
    f_lo = kernels::dot(e, uniform) - target;
  }
  double f_hi = hi.distortion - target;
  Point top = hi;
  Point lo;
  bool have_lo = false;
  double best_lower = hi.lower;
  int side = 0;
  int stalled = 0;
  double last_width = hi.s - lo_s;
  double tol = opt.search_tol;
  int cap = opt.search_inner;

  auto place = [&](Point pt) {
    best_lower = std::max(best_lower, pt.lower);
    const double f = pt.distortion - target;
    if (f <= 0.0) {
      hi = std::move(pt);
      f_hi = f;
      if (side == 1) f_lo *= 0.5;
      side = 1;
    } else {
      lo_s = pt.s;
      lo = std::move(pt);
      f_lo = f;
      have_lo = true;
      if (side == -1) f_hi *= 0.5;
      side = -1;
    }
  };
  auto run = [&](double s, const std::vector<double>& q) {
    Point pt = ba.run(s, q, target, tol, cap);
    r.iterations += pt.iterations;
    ++r.outer_iterations;
    return pt;
  };

  // Search with loose inner solves, then re-run the bracket ends tightly and
  // continue tightly if they no longer bracket the target.
  for (bool tight = false;; tight = true) {
    while (r.outer_iterations < opt.max_outer) {
      if (hi.s * (target - hi.distortion) <= 0.1 * opt.gap_tol && target - hi.distortion <= opt.distortion_tol) break;
      if (hi.s - lo_s <= 1e-9 * hi.s) break;
      double mid = (lo_s * f_hi - hi.s * f_lo) / (f_hi - f_lo);
      if (stalled >= 3 || !(mid > lo_s && mid < hi.s)) {
        mid = 0.5 * (lo_s + hi.s);
        stalled = 0;
      }
      const bool near_hi = hi.s - mid < mid - lo_s || !have_lo;
      place(run(mid, near_hi ? hi.q : lo.q));
      const double width = hi.s - lo_s;
      if (width <= 0.5 * last_width) {
        last_width = width;
        stalled = 0;
      } else {
        ++stalled;
      }
    }
    if (tight) break;
    tol = opt.inner_tol;
    cap = opt.max_inner;
    side = 0;
    Point h = run(hi.s, hi.q);
    if (h.distortion > target) {
      place(std::move(h));
      place(run(top.s, top.q));
    } else {
      place(std::move(h));
      if (have_lo) {
        Point l = run(lo.s, lo.q);
        if (l.distortion <= target) {
          have_lo = false;
          lo_s = 0.0;
          f_lo = top.distortion;  // any positive value restarts the bracket
        }
        place(std::move(l));
      }
    }
    side = 0;
    last_width = hi.s - lo_s;
    if (hi.s * (target - hi.distortion) <= 0.1 * opt.gap_tol && target - hi.distortion <= opt.distortion_tol) break;
  }

  r.s = hi.s;
  r.lower_bound = std::max(best_lower, 0.0);
  std::vector<double> w = ba.channel(hi);
  if (hi.s * (target - hi.distortion) > 0.1 * opt.gap_tol && have_lo) {
    // The curve has a straight piece here; mixing the two bracketing channels
    // meets the target and, I being convex in the channel, costs at most the
    // chord.
    std::vector<double> wl = ba.channel(lo);
    const double dh = channel_distortion(pr, w), dl = channel_distortion(pr, wl);
    if (dl > dh) {
      const double lam = std::clamp((target - dh) / (dl - dh), 0.0, 1.0) * (1.0 - 1e-12);
      std::vector<double> mixed(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) mixed[i] = lam * wl[i] + (1.0 - lam) * w[i];
      if (channel_distortion(pr, mixed) <= target &&
          channel_information(pr.p, mixed, ny) < channel_information(pr.p, w, ny)) {
        w = std::move(mixed);
      }
    }
  }
  if (const double dw = channel_distortion(pr, w); dw > target) {
    // Polishing can move the distortion just past the target.
    const std::vector<double> wb = nearest_channel(pr);
    const double lam = std::min((dw - target) / (dw - pr.base) * (1.0 + 1e-9), 1.0);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = (1.0 - lam) * w[i] + lam * wb[i];
  }
  return finish(pr, std::move(w), r, opt);
}

}  // namespace

}  // namespace mdk
