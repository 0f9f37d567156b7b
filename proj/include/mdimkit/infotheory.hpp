#pragma once

// Entropy and mutual information of finite distributions (natural logs),
// and the standard inequalities as checkable predicates.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mdimkit/spaces.hpp"

namespace mdk {

inline constexpr double kNormTol = 1e-12;
inline constexpr double kIneqSlack = 1e-9;

class Pmf {
 public:
  // Throws std::invalid_argument unless probs >= 0 and sum to 1 within 1e-12.
  explicit Pmf(std::vector<double> probs);

  static Pmf uniform(std::size_t n);
  static Pmf point_mass(std::size_t n, std::size_t at);

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  std::span<const double> probs() const { return p_; }

 private:
  std::vector<double> p_;
};

// Row-stochastic matrix nu(y|x), inputs x outputs.
class Channel {
 public:
  Channel(std::size_t inputs, std::size_t outputs, std::vector<double> w);

  std::size_t inputs() const { return inputs_; }
  std::size_t outputs() const { return outputs_; }
  double operator()(std::size_t x, std::size_t y) const { return w_[x * outputs_ + y]; }
  std::span<const double> data() const { return w_; }

 private:
  std::size_t inputs_;
  std::size_t outputs_;
  std::vector<double> w_;
};

// (1 - t) a + t b, entrywise.
Pmf mix(const Pmf& a, const Pmf& b, double t);
Channel mix(const Channel& a, const Channel& b, double t);

class JointPmf {
 public:
  // Row-major rows x cols; throws like Pmf.
  JointPmf(std::size_t rows, std::size_t cols, std::vector<double> p);

  // mu(x) nu(y|x)
  static JointPmf from_channel(const Pmf& mu, const Channel& nu);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t x, std::size_t y) const { return p_[x * cols_ + y]; }
  std::span<const double> data() const { return p_; }
  const Pmf& row_marginal() const { return px_; }
  const Pmf& col_marginal() const { return py_; }
  JointPmf transpose() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> p_;
  Pmf px_;
  Pmf py_;
};

// Distribution of (X, Y, Z), index (x * ny + y) * nz + z.
class TripleJoint {
 public:
  TripleJoint(std::size_t nx, std::size_t ny, std::size_t nz, std::vector<double> p);

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t nz() const { return nz_; }
  double operator()(std::size_t x, std::size_t y, std::size_t z) const { return p_[(x * ny_ + y) * nz_ + z]; }

  JointPmf xy() const;
  JointPmf yz() const;
  JointPmf xz() const;
  // Joint of Y (rows) and the pair (X, Z) (columns, index x * nz + z).
  JointPmf y_xz() const;

 private:
  std::size_t nx_, ny_, nz_;
  std::vector<double> p_;
};

// -sum p log p with 0 log 0 = 0.
double entropy(std::span<const double> p);
double entropy(const Pmf& p);
double binary_entropy(double q);
double joint_entropy(const JointPmf& j);
// H(X | Y) for rows X, columns Y.
double conditional_entropy(const JointPmf& j);

double mutual_information(const JointPmf& j);
double mutual_information(const Pmf& mu, const Channel& nu);

struct DataProcessingCheck {
  double i_xy = 0.0;
  double i_xfy = 0.0;
  bool holds = false;
};

// I(X; f(Y)) <= I(X; Y) + 1e-9, f given as a table Y -> {0..z_size-1}.
DataProcessingCheck check_data_processing(const JointPmf& j, std::span<const std::size_t> f, std::size_t z_size);

struct AdditivityCheck {
  double i_y_xz = 0.0;
  double i_yx = 0.0;
  double i_yz = 0.0;
  bool sub_applicable = false;    // X, Z conditionally independent given Y
  bool sub_ok = true;             // meaningful only when applicable
  bool super_applicable = false;  // X, Z independent
  bool super_ok = true;
};

AdditivityCheck check_sub_super_additivity(const TripleJoint& t);

struct FanoCheck {
  double h_x_given_y = 0.0;
  double error_probability = 0.0;
  double bound = 0.0;  // H(P_e) + P_e log |X|
  bool holds = false;
};

// Fano's inequality for the decoder f: Y -> X (argmax of the posterior
// when f is empty).
FanoCheck check_fano(const JointPmf& j, std::span<const std::size_t> f = {});

// (1 - 1/D) log|S| - H(1/D). Throws for D <= 2 or S_size = 0.
double fano_bound(double eps, double D, std::size_t s_size);

// log|S| - |F| H(alpha) - alpha |F| log|A|. Throws for alpha outside [0, 1/2].
double fano_bound_linf(std::size_t s_size, std::size_t f_size, double alpha, std::size_t a_size);

struct ConcavityCheck {
  bool concave_ok = true;  // I((1-t)mu1 + t mu2, nu) >= (1-t) I(mu1,nu) + t I(mu2,nu) - 1e-9
  bool convex_ok = true;   // I(mu, (1-t)nu1 + t nu2) <= (1-t) I(mu,nu1) + t I(mu,nu2) + 1e-9
  double worst_concave_gap = 0.0;  // min over t of lhs - rhs
  double worst_convex_gap = 0.0;   // min over t of rhs - lhs
};

ConcavityCheck check_concavity_convexity(const Pmf& mu1, const Pmf& mu2, const Channel& nu, const Pmf& mu,
                                         const Channel& nu1, const Channel& nu2, std::span<const double> ts);

enum class CheckStatus { Holds, Violated, NotApplicable };

std::string status_name(CheckStatus s);

struct EmpiricalFano {
  CheckStatus status = CheckStatus::NotApplicable;
  double mutual_information = 0.0;
  double bound = 0.0;
  double separation = 0.0;  // min pairwise distance in S
  double distortion = 0.0;  // E d(X, Y)
  std::string reason;       // why the check was not applicable
};

// Lemma-style Fano check: X uniform on S (rows of `joint`), S 2D eps-separated
// and E d(X, Y) < eps, with Y ranging over `ys` (columns of `joint`). When a
// precondition fails nothing is asserted.
EmpiricalFano empirical_fano_check(const PointSet& s, const PointSet& ys, const OrbitMetric& m,
                                   const JointPmf& joint, double eps, double D);

}  // namespace mdk
