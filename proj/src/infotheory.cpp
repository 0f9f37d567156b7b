#include "mdimkit/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mdk {

namespace {

void check_distribution(std::span<const double> p, const char* what) {
  if (p.empty()) throw std::invalid_argument(std::string(what) + " must be nonempty");
  double s = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " has a negative entry");
    s += v;
  }
  if (std::abs(s - 1.0) > kNormTol) throw std::invalid_argument(std::string(what) + " does not sum to 1");
}

std::vector<double> row_sums(std::span<const double> p, std::size_t rows, std::size_t cols) {
  std::vector<double> out(rows, 0.0);
  for (std::size_t x = 0; x < rows; ++x) {
    for (std::size_t y = 0; y < cols; ++y) out[x] += p[x * cols + y];
  }
  return out;
}

std::vector<double> col_sums(std::span<const double> p, std::size_t rows, std::size_t cols) {
  std::vector<double> out(cols, 0.0);
  for (std::size_t x = 0; x < rows; ++x) {
    for (std::size_t y = 0; y < cols; ++y) out[y] += p[x * cols + y];
  }
  return out;
}

// Marginals of a validated joint can drift from 1 by rounding only.
Pmf marginal(std::vector<double> v) {
  const double s = std::accumulate(v.begin(), v.end(), 0.0);
  if (std::abs(s - 1.0) > kNormTol) {
    for (double& x : v) x /= s;
  }
  return Pmf(std::move(v));
}

std::vector<double> validated_joint(std::vector<double> p, std::size_t rows, std::size_t cols) {
  if (p.size() != rows * cols) throw std::invalid_argument("joint matrix has the wrong size");
  check_distribution(p, "joint pmf");
  return p;
}

double xlogx_over(double p, double q) { return p > 0.0 ? p * std::log(p / q) : 0.0; }

}  // namespace

Pmf::Pmf(std::vector<double> probs) : p_(std::move(probs)) { check_distribution(p_, "pmf"); }

Pmf Pmf::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("pmf must be nonempty");
  return Pmf(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Pmf Pmf::point_mass(std::size_t n, std::size_t at) {
  if (at >= n) throw std::out_of_range("point mass outside the support");
  std::vector<double> p(n, 0.0);
  p[at] = 1.0;
  return Pmf(std::move(p));
}

Channel::Channel(std::size_t inputs, std::size_t outputs, std::vector<double> w)
    : inputs_(inputs), outputs_(outputs), w_(std::move(w)) {
  if (inputs == 0 || outputs == 0) throw std::invalid_argument("channel must be nonempty");
  if (w_.size() != inputs * outputs) throw std::invalid_argument("channel matrix has the wrong size");
  for (std::size_t x = 0; x < inputs; ++x) {
    check_distribution(std::span<const double>(w_).subspan(x * outputs, outputs), "channel row");
  }
}

Pmf mix(const Pmf& a, const Pmf& b, double t) {
  if (a.size() != b.size()) throw std::invalid_argument("mixing pmfs with different supports");
  std::vector<double> p(a.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = (1.0 - t) * a[i] + t * b[i];
  return marginal(std::move(p));
}

Channel mix(const Channel& a, const Channel& b, double t) {
  if (a.inputs() != b.inputs() || a.outputs() != b.outputs()) {
    throw std::invalid_argument("mixing channels of different shapes");
  }
  std::vector<double> w(a.data().size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = (1.0 - t) * a.data()[i] + t * b.data()[i];
  return Channel(a.inputs(), a.outputs(), std::move(w));
}

JointPmf::JointPmf(std::size_t rows, std::size_t cols, std::vector<double> p)
    : rows_(rows),
      cols_(cols),
      p_(validated_joint(std::move(p), rows, cols)),
      px_(marginal(row_sums(p_, rows, cols))),
      py_(marginal(col_sums(p_, rows, cols))) {}

JointPmf JointPmf::from_channel(const Pmf& mu, const Channel& nu) {
  if (mu.size() != nu.inputs()) throw std::invalid_argument("channel inputs do not match the pmf");
  std::vector<double> p(mu.size() * nu.outputs());
  for (std::size_t x = 0; x < mu.size(); ++x) {
    for (std::size_t y = 0; y < nu.outputs(); ++y) p[x * nu.outputs() + y] = mu[x] * nu(x, y);
  }
  return JointPmf(mu.size(), nu.outputs(), std::move(p));
}

JointPmf JointPmf::transpose() const {
  std::vector<double> t(p_.size());
  for (std::size_t x = 0; x < rows_; ++x) {
    for (std::size_t y = 0; y < cols_; ++y) t[y * rows_ + x] = p_[x * cols_ + y];
  }
  return JointPmf(cols_, rows_, std::move(t));
}

TripleJoint::TripleJoint(std::size_t nx, std::size_t ny, std::size_t nz, std::vector<double> p)
    : nx_(nx), ny_(ny), nz_(nz), p_(std::move(p)) {
  if (p_.size() != nx * ny * nz) throw std::invalid_argument("triple joint has the wrong size");
  check_distribution(p_, "triple joint");
}

JointPmf TripleJoint::xy() const {
  std::vector<double> q(nx_ * ny_, 0.0);
  for (std::size_t x = 0; x < nx_; ++x)
    for (std::size_t y = 0; y < ny_; ++y)
      for (std::size_t z = 0; z < nz_; ++z) q[x * ny_ + y] += (*this)(x, y, z);
  return JointPmf(nx_, ny_, std::move(q));
}

JointPmf TripleJoint::yz() const {
  std::vector<double> q(ny_ * nz_, 0.0);
  for (std::size_t x = 0; x < nx_; ++x)
    for (std::size_t y = 0; y < ny_; ++y)
      for (std::size_t z = 0; z < nz_; ++z) q[y * nz_ + z] += (*this)(x, y, z);
  return JointPmf(ny_, nz_, std::move(q));
}

JointPmf TripleJoint::xz() const {
  std::vector<double> q(nx_ * nz_, 0.0);
  for (std::size_t x = 0; x < nx_; ++x)
    for (std::size_t y = 0; y < ny_; ++y)
      for (std::size_t z = 0; z < nz_; ++z) q[x * nz_ + z] += (*this)(x, y, z);
  return JointPmf(nx_, nz_, std::move(q));
}

JointPmf TripleJoint::y_xz() const {
  std::vector<double> q(ny_ * nx_ * nz_, 0.0);
  for (std::size_t x = 0; x < nx_; ++x)
    for (std::size_t y = 0; y < ny_; ++y)
      for (std::size_t z = 0; z < nz_; ++z) q[y * nx_ * nz_ + x * nz_ + z] = (*this)(x, y, z);
  return JointPmf(ny_, nx_ * nz_, std::move(q));
}

double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

double entropy(const Pmf& p) { return entropy(p.probs()); }

double binary_entropy(double q) {
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("binary entropy needs q in [0, 1]");
  const double v[2] = {q, 1.0 - q};
  return entropy(v);
}

double joint_entropy(const JointPmf& j) { return entropy(j.data()); }

double conditional_entropy(const JointPmf& j) { return joint_entropy(j) - entropy(j.col_marginal()); }

double mutual_information(const JointPmf& j) {
  const auto& px = j.row_marginal();
  const auto& py = j.col_marginal();
  double i = 0.0;
  for (std::size_t x = 0; x < j.rows(); ++x) {
    for (std::size_t y = 0; y < j.cols(); ++y) i += xlogx_over(j(x, y), px[x] * py[y]);
  }
  return std::max(i, 0.0);
}

double mutual_information(const Pmf& mu, const Channel& nu) {
  return mutual_information(JointPmf::from_channel(mu, nu));
}

DataProcessingCheck check_data_processing(const JointPmf& j, std::span<const std::size_t> f, std::size_t z_size) {
  if (f.size() != j.cols()) throw std::invalid_argument("f must map every y");
  std::vector<double> q(j.rows() * z_size, 0.0);
  for (std::size_t y = 0; y < j.cols(); ++y) {
    if (f[y] >= z_size) throw std::out_of_range("f maps outside Z");
    for (std::size_t x = 0; x < j.rows(); ++x) q[x * z_size + f[y]] += j(x, y);
  }
  DataProcessingCheck c;
  c.i_xy = mutual_information(j);
  c.i_xfy = mutual_information(JointPmf(j.rows(), z_size, std::move(q)));
  c.holds = c.i_xfy <= c.i_xy + kIneqSlack;
  return c;
}

AdditivityCheck check_sub_super_additivity(const TripleJoint& t) {
  AdditivityCheck c;
  c.i_y_xz = mutual_information(t.y_xz());
  c.i_yx = mutual_information(t.xy());
  c.i_yz = mutual_information(t.yz());

  // P(x,z|y) = P(x|y) P(z|y)  <=>  P(x,y,z) P(y) = P(x,y) P(y,z)
  const JointPmf xy = t.xy();
  const JointPmf yz = t.yz();
  const Pmf& py = xy.col_marginal();
  c.sub_applicable = true;
  for (std::size_t y = 0; y < t.ny() && c.sub_applicable; ++y) {
    if (py[y] == 0.0) continue;
    for (std::size_t x = 0; x < t.nx() && c.sub_applicable; ++x) {
      for (std::size_t z = 0; z < t.nz(); ++z) {
        const double cond = t(x, y, z) / py[y];
        const double prod = (xy(x, y) / py[y]) * (yz(y, z) / py[y]);
        if (std::abs(cond - prod) > kNormTol) {
          c.sub_applicable = false;
          break;
        }
      }
    }
  }

  const JointPmf xz = t.xz();
  c.super_applicable = true;
  for (std::size_t x = 0; x < t.nx() && c.super_applicable; ++x) {
    for (std::size_t z = 0; z < t.nz(); ++z) {
      if (std::abs(xz(x, z) - xz.row_marginal()[x] * xz.col_marginal()[z]) > kNormTol) {
        c.super_applicable = false;
        break;
      }
    }
  }

  if (c.sub_applicable) c.sub_ok = c.i_y_xz <= c.i_yx + c.i_yz + kIneqSlack;
  if (c.super_applicable) c.super_ok = c.i_y_xz >= c.i_yx + c.i_yz - kIneqSlack;
  return c;
}

FanoCheck check_fano(const JointPmf& j, std::span<const std::size_t> f) {
  std::vector<std::size_t> decoder(f.begin(), f.end());
  if (decoder.empty()) {
    decoder.resize(j.cols());
    for (std::size_t y = 0; y < j.cols(); ++y) {
      std::size_t best = 0;
      for (std::size_t x = 1; x < j.rows(); ++x) {
        if (j(x, y) > j(best, y)) best = x;
      }
      decoder[y] = best;
    }
  }
  if (decoder.size() != j.cols()) throw std::invalid_argument("decoder must map every y");

  FanoCheck c;
  double correct = 0.0;
  for (std::size_t y = 0; y < j.cols(); ++y) {
    if (decoder[y] >= j.rows()) throw std::out_of_range("decoder maps outside X");
    correct += j(decoder[y], y);
  }
  c.error_probability = std::clamp(1.0 - correct, 0.0, 1.0);
  c.h_x_given_y = conditional_entropy(j);
  c.bound = binary_entropy(c.error_probability) + c.error_probability * std::log(static_cast<double>(j.rows()));
  c.holds = c.h_x_given_y <= c.bound + kIneqSlack;
  return c;
}

double fano_bound(double eps, double D, std::size_t s_size) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(D > 2.0)) throw std::invalid_argument("Fano bound needs D > 2");
  if (s_size == 0) throw std::invalid_argument("separated set must be nonempty");
  return (1.0 - 1.0 / D) * std::log(static_cast<double>(s_size)) - binary_entropy(1.0 / D);
}

double fano_bound_linf(std::size_t s_size, std::size_t f_size, double alpha, std::size_t a_size) {
  if (!(alpha >= 0.0 && alpha <= 0.5)) throw std::invalid_argument("alpha must lie in [0, 1/2]");
  if (s_size == 0 || f_size == 0 || a_size == 0) throw std::invalid_argument("sizes must be positive");
  const double f = static_cast<double>(f_size);
  return std::log(static_cast<double>(s_size)) - f * binary_entropy(alpha) -
         alpha * f * std::log(static_cast<double>(a_size));
}

ConcavityCheck check_concavity_convexity(const Pmf& mu1, const Pmf& mu2, const Channel& nu, const Pmf& mu,
                                         const Channel& nu1, const Channel& nu2, std::span<const double> ts) {
  ConcavityCheck c;
  const double i1 = mutual_information(mu1, nu);
  const double i2 = mutual_information(mu2, nu);
  const double k1 = mutual_information(mu, nu1);
  const double k2 = mutual_information(mu, nu2);
  bool first = true;
  for (double t : ts) {
    if (t < 0.0 || t > 1.0) throw std::invalid_argument("t must lie in [0, 1]");
    const double concave_gap = mutual_information(mix(mu1, mu2, t), nu) - ((1.0 - t) * i1 + t * i2);
    const double convex_gap = ((1.0 - t) * k1 + t * k2) - mutual_information(mu, mix(nu1, nu2, t));
    if (first || concave_gap < c.worst_concave_gap) c.worst_concave_gap = concave_gap;
    if (first || convex_gap < c.worst_convex_gap) c.worst_convex_gap = convex_gap;
    first = false;
  }
  c.concave_ok = c.worst_concave_gap >= -kIneqSlack;
  c.convex_ok = c.worst_convex_gap >= -kIneqSlack;
  return c;
}

std::string status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Holds:
      return "holds";
    case CheckStatus::Violated:
      return "violated";
    case CheckStatus::NotApplicable:
      return "not_applicable";
  }
  return "unknown";
}

EmpiricalFano empirical_fano_check(const PointSet& s, const PointSet& ys, const OrbitMetric& m,
                                   const JointPmf& joint, double eps, double D) {
  if (joint.rows() != s.size() || joint.cols() != ys.size()) {
    throw std::invalid_argument("joint does not match the point sets");
  }
  EmpiricalFano r;
  r.bound = fano_bound(eps, D, s.size());

  const double u = 1.0 / static_cast<double>(s.size());
  for (std::size_t x = 0; x < s.size(); ++x) {
    if (std::abs(joint.row_marginal()[x] - u) > kNormTol) {
      r.reason = "X is not uniform on S";
      return r;
    }
  }

  r.separation = s.size() > 1 ? std::numeric_limits<double>::infinity() : 0.0;
  std::vector<double> row(s.size());
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    m.row(s.at(i), s, row);
    for (std::size_t j = i + 1; j < s.size(); ++j) r.separation = std::min(r.separation, row[j]);
  }
  if (s.size() > 1 && r.separation < 2.0 * D * eps) {
    r.reason = "S is not 2D eps-separated";
    return r;
  }

  std::vector<double> drow(ys.size());
  for (std::size_t x = 0; x < s.size(); ++x) {
    m.row(s.at(x), ys, drow);
    for (std::size_t y = 0; y < ys.size(); ++y) r.distortion += joint(x, y) * drow[y];
  }
  if (!(r.distortion < eps)) {
    r.reason = "E d(X, Y) >= eps";
    return r;
  }

  r.mutual_information = mutual_information(joint);
  r.status = r.mutual_information >= r.bound - kIneqSlack ? CheckStatus::Holds : CheckStatus::Violated;
  return r;
}

}  // namespace mdk
