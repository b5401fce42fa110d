#pragma once

#include <string>
#include <vector>

#include "cavityq/hilbert.hpp"
#include "cavityq/types.hpp"

namespace cavityq {

struct EnvelopeTerm {
  int m = 0;
  double c = 1.0;
};

using Envelope = std::vector<EnvelopeTerm>;

// Dimensionless pulse description; times are in units of tau_d (u = t / tau_d).
struct PulseSpec {
  double omega_tau_d = kPi;
  double area = 0.0;  // Omega * tau_d
  double phi = 0.0;
  Envelope envelope{{0, 1.0}};
  double window = 5.0;  // T_u

  std::vector<std::string> validate() const;
  double tau_d(const SystemSpec& s) const { return omega_tau_d / s.omega; }
  double drive(const SystemSpec& s) const { return area / tau_d(s); }
  double half_width(const SystemSpec& s) const { return window * tau_d(s); }
};

inline constexpr int kMaxHermiteOrder = 12;

// Normalized Hermite-Gaussian function.
double hg_envelope(int m, double u);
// psi_0..psi_mmax at u via the three-term recurrence.
void hg_values(int mmax, double u, double* out);

double envelope_value(const PulseSpec& p, double u);
double pulse_value(const PulseSpec& p, double u);

// d^deriv/dk^deriv of the envelope transform f0^(k) = int f0(u) e^{-iku} du, deriv in 0..2.
cplx envelope_fourier(const PulseSpec& p, double k, int deriv = 0);
// Same for the carrier-modulated shape f(u).
cplx pulse_fourier(const PulseSpec& p, double k, int deriv = 0);
// int |f(u)| du over the window, the triangle bound on |s1|.
double pulse_l1(const PulseSpec& p);

// Running integrals from -T_u to u by adaptive Gauss-Kronrod panels.
cplx functional_s1(const PulseSpec& p, double u, double tol = 1e-9);
cplx functional_s11(const PulseSpec& p, double u, double tol = 1e-9);
cplx functional_s12(const PulseSpec& p, double u, double tol = 1e-9);

struct FunctionalSet {
  double u = 0.0;
  cplx s1, s11, s12, s221, s222;
  cplx sphase;  // int f e^{-iku} (-i) s1*, source of the scalar phase
  cplx s22() const { return s221 + s222; }
};

// Cumulative functionals on uniform Chebyshev panels over [-T_u, T_u].
// Immutable after construction; at() is safe to call concurrently.
class FunctionalTable {
 public:
  explicit FunctionalTable(const PulseSpec& p, int nodes = 16, double panel_width = 0.0);

  FunctionalSet at(double u) const;
  FunctionalSet final() const { return boundary_.back(); }
  const PulseSpec& pulse() const { return pulse_; }
  double panel_width() const { return h_; }
  int panels() const { return int(boundary_.size()) - 1; }

  static double default_panel_width(const PulseSpec& p);

 private:
  // Integrate one sub-panel [a, b] starting from the values in `start`.
  FunctionalSet advance(const FunctionalSet& start, double b) const;

  PulseSpec pulse_;
  int nodes_;
  double h_;
  std::vector<double> x_;      // reference nodes on [-1, 1]
  Eigen::MatrixXd integ_;       // cumulative integration on [-1, 1]
  std::vector<FunctionalSet> boundary_;
};

FunctionalSet functionals_at(const PulseSpec& p, double u);

}  // namespace cavityq
