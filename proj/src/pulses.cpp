#include "cavityq/pulses.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace cavityq {

std::vector<std::string> PulseSpec::validate() const {
  if (!(window >= 4.0)) throw Error(ErrorKind::InvalidArgument, "pulse window T_u must be >= 4");
  if (!(omega_tau_d > 0.0) || !std::isfinite(omega_tau_d))
    throw Error(ErrorKind::InvalidArgument, "omega_tau_d must be positive");
  if (!std::isfinite(area) || !std::isfinite(phi))
    throw Error(ErrorKind::InvalidArgument, "area and phi must be finite");
  if (envelope.empty()) throw Error(ErrorKind::InvalidArgument, "envelope has no terms");
  for (const auto& t : envelope) {
    if (t.m < 0 || t.m > kMaxHermiteOrder) {
      std::ostringstream os;
      os << "Hermite-Gaussian order " << t.m << " outside [0, " << kMaxHermiteOrder << "]";
      throw Error(ErrorKind::InvalidArgument, os.str());
    }
    if (!std::isfinite(t.c)) throw Error(ErrorKind::InvalidArgument, "envelope coefficient not finite");
  }
  std::vector<std::string> w;
  if (omega_tau_d < 3.0) {
    std::ostringstream os;
    os << "omega_tau_d = " << omega_tau_d << " < 3: carrier poorly defined within the envelope";
    w.push_back(os.str());
  }
  return w;
}

void hg_values(int mmax, double u, double* out) {
  out[0] = std::pow(kPi, -0.25) * std::exp(-0.5 * u * u);
  if (mmax >= 1) out[1] = std::sqrt(2.0) * u * out[0];
  for (int m = 1; m < mmax; ++m)
    out[m + 1] = std::sqrt(2.0 / (m + 1)) * u * out[m] - std::sqrt(double(m) / (m + 1)) * out[m - 1];
}

double hg_envelope(int m, double u) {
  if (m < 0 || m > kMaxHermiteOrder + 1) throw Error(ErrorKind::InvalidArgument, "Hermite order out of range");
  double v[kMaxHermiteOrder + 2];
  hg_values(m, u, v);
  return v[m];
}

namespace {

int max_order(const PulseSpec& p) {
  int m = 0;
  for (const auto& t : p.envelope) m = std::max(m, t.m);
  return m;
}

}  // namespace

double envelope_value(const PulseSpec& p, double u) {
  double v[kMaxHermiteOrder + 2];
  hg_values(max_order(p), u, v);
  double f = 0.0;
  for (const auto& t : p.envelope) f += t.c * v[t.m];
  return f;
}

double pulse_value(const PulseSpec& p, double u) {
  return envelope_value(p, u) * std::cos(p.omega_tau_d * u + p.phi);
}

cplx envelope_fourier(const PulseSpec& p, double k, int deriv) {
  if (deriv < 0 || deriv > 2) throw Error(ErrorKind::InvalidArgument, "envelope_fourier supports deriv 0..2");
  const int mm = max_order(p);
  double v[kMaxHermiteOrder + 3];
  hg_values(mm + 1, k, v);
  static const cplx kPowMinusI[4] = {1.0, -I, -1.0, I};
  cplx acc = 0.0;
  for (const auto& t : p.envelope) {
    const int m = t.m;
    double d = 0.0;
    if (deriv == 0) {
      d = v[m];
    } else if (deriv == 1) {
      d = -std::sqrt((m + 1) / 2.0) * v[m + 1];
      if (m > 0) d += std::sqrt(m / 2.0) * v[m - 1];
    } else {
      d = (k * k - 2.0 * m - 1.0) * v[m];
    }
    acc += t.c * kPowMinusI[m % 4] * d;
  }
  return std::sqrt(2.0 * kPi) * acc;
}

cplx pulse_fourier(const PulseSpec& p, double k, int deriv) {
  const cplx e = std::exp(I * p.phi);
  return 0.5 * e * envelope_fourier(p, k - p.omega_tau_d, deriv) +
         0.5 * std::conj(e) * envelope_fourier(p, k + p.omega_tau_d, deriv);
}

namespace {

double gk_panel_width(const PulseSpec& p) {
  return std::min(0.5, 2.0 * kPi / (8.0 * p.omega_tau_d));
}

template <class F>
cplx running_integral(const PulseSpec& p, double u, F&& weight, double tol) {
  using boost::math::quadrature::gauss_kronrod;
  const double a0 = -p.window;
  const double b0 = std::min(u, p.window);
  if (b0 <= a0) return 0.0;
  const double w = gk_panel_width(p);
  const int panels = std::max(1, int(std::ceil((b0 - a0) / w)));
  const double h = (b0 - a0) / panels;
  const double k = p.omega_tau_d;
  auto integrand = [&](double x) { return weight(x) * pulse_value(p, x) * std::exp(-I * k * x); };
  cplx acc = 0.0;
  double err_total = 0.0;
  for (int j = 0; j < panels; ++j) {
    const double a = a0 + j * h;
    const double b = (j + 1 == panels) ? b0 : a + h;
    double err = 0.0;
    acc += gauss_kronrod<double, 15>::integrate(integrand, a, b, 12, 1e-14, &err);
    err_total += err;
  }
  if (!(err_total <= tol) || !std::isfinite(acc.real()) || !std::isfinite(acc.imag())) {
    std::ostringstream os;
    os << "running integral error estimate " << err_total << " exceeds " << tol;
    throw Error(ErrorKind::QuadratureNonConvergence, os.str());
  }
  return acc;
}

}  // namespace

cplx functional_s1(const PulseSpec& p, double u, double tol) {
  return running_integral(p, u, [](double) { return 1.0; }, tol);
}

cplx functional_s11(const PulseSpec& p, double u, double tol) {
  return running_integral(p, u, [](double x) { return x; }, tol);
}

cplx functional_s12(const PulseSpec& p, double u, double tol) {
  return running_integral(p, u, [](double x) { return 0.5 * x * x; }, tol);
}

double pulse_l1(const PulseSpec& p) {
  using boost::math::quadrature::gauss_kronrod;
  const double w = gk_panel_width(p);
  const int panels = std::max(1, int(std::ceil(2.0 * p.window / w)));
  const double h = 2.0 * p.window / panels;
  double acc = 0.0;
  for (int j = 0; j < panels; ++j) {
    const double a = -p.window + j * h;
    acc += gauss_kronrod<double, 15>::integrate([&](double x) { return std::abs(pulse_value(p, x)); },
                                                 a, a + h, 8, 1e-10);
  }
  return acc;
}

double FunctionalTable::default_panel_width(const PulseSpec& p) {
  return std::min(0.25, 2.0 * kPi / (8.0 * p.omega_tau_d));
}

FunctionalTable::FunctionalTable(const PulseSpec& p, int nodes, double panel_width)
    : pulse_(p), nodes_(nodes) {
  if (nodes_ < 4) throw Error(ErrorKind::InvalidArgument, "need at least 4 Chebyshev nodes per panel");
  const double target = panel_width > 0.0 ? panel_width : default_panel_width(p);
  const int panels = std::max(1, int(std::ceil(2.0 * p.window / target)));
  h_ = 2.0 * p.window / panels;

  // Chebyshev-Lobatto nodes and the matrix mapping nodal values to running integrals.
  const int n = nodes_;
  x_.resize(n);
  for (int i = 0; i < n; ++i) x_[i] = -std::cos(kPi * i / (n - 1));
  Eigen::MatrixXd V(n, n), W(n, n);
  auto cheb = [](int j, double x) { return std::cos(j * std::acos(std::clamp(x, -1.0, 1.0))); };
  for (int i = 0; i < n; ++i) {
    const double x = x_[i];
    for (int j = 0; j < n; ++j) {
      V(i, j) = cheb(j, x);
      if (j == 0) {
        W(i, j) = x + 1.0;
      } else if (j == 1) {
        W(i, j) = 0.5 * (x * x - 1.0);
      } else {
        auto prim = [&](double y) { return 0.5 * (cheb(j + 1, y) / (j + 1) - cheb(j - 1, y) / (j - 1)); };
        W(i, j) = prim(x) - prim(-1.0);
      }
    }
  }
  integ_ = W * V.inverse();

  boundary_.reserve(panels + 1);
  FunctionalSet s;
  s.u = -p.window;
  boundary_.push_back(s);
  for (int j = 0; j < panels; ++j) {
    const double b = (j + 1 == panels) ? p.window : -p.window + (j + 1) * h_;
    boundary_.push_back(advance(boundary_.back(), b));
  }
}

FunctionalSet FunctionalTable::advance(const FunctionalSet& start, double b) const {
  const int n = nodes_;
  const double a = start.u;
  const double half = 0.5 * (b - a);
  const double k = pulse_.omega_tau_d;
  CVector w(n), xw(n), x2w(n);
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) {
    const double x = a + half * (x_[i] + 1.0);
    xs[i] = x;
    w[i] = pulse_value(pulse_, x) * std::exp(-I * k * x);
    xw[i] = x * w[i];
    x2w[i] = 0.5 * x * x * w[i];
  }
  const Eigen::MatrixXcd S = integ_.cast<cplx>() * half;
  CVector s1 = S * w, s11 = S * xw, s12 = S * x2w;
  s1.array() += start.s1;
  s11.array() += start.s11;
  s12.array() += start.s12;
  CVector g221(n), g222(n), gph(n);
  for (int i = 0; i < n; ++i) {
    g221[i] = 0.5 * xs[i] * xs[i] * w[i] * (-I) * std::conj(s1[i]);
    g222[i] = xs[i] * w[i] * (-I) * std::conj(s11[i]);
    gph[i] = w[i] * (-I) * std::conj(s1[i]);
  }
  FunctionalSet out;
  out.u = b;
  out.s1 = s1[n - 1];
  out.s11 = s11[n - 1];
  out.s12 = s12[n - 1];
  out.s221 = start.s221 + (S.row(n - 1) * g221)(0);
  out.s222 = start.s222 + (S.row(n - 1) * g222)(0);
  out.sphase = start.sphase + (S.row(n - 1) * gph)(0);
  return out;
}

FunctionalSet FunctionalTable::at(double u) const {
  const double T = pulse_.window;
  if (u <= -T) {
    FunctionalSet s = boundary_.front();
    s.u = u;
    return s;
  }
  if (u >= T) {
    FunctionalSet s = boundary_.back();
    s.u = u;
    return s;
  }
  int j = int(std::floor((u + T) / h_));
  j = std::clamp(j, 0, panels() - 1);
  const FunctionalSet& start = boundary_[j];
  if (u == start.u) return start;
  return advance(start, u);
}

FunctionalSet functionals_at(const PulseSpec& p, double u) { return FunctionalTable(p).at(u); }

}  // namespace cavityq
