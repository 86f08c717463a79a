#include "qiwave/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qiwave/errors.hpp"
#include "qiwave/grid.hpp"

namespace qiwave {

double Equation::omega_squared(int n1, int n2) const {
  const double r2 = static_cast<double>(n1) * n1 + static_cast<double>(n2) * n2;
  switch (kind) {
    case Kind::nlkg: return 1.0 + r2;
    case Kind::nlw: return r2;
    case Kind::nlkg_beta: return std::pow(1.0 + r2, beta);
  }
  return 0.0;
}

std::string to_string(Equation::Kind k) {
  switch (k) {
    case Equation::Kind::nlkg: return "nlkg";
    case Equation::Kind::nlw: return "nlw";
    case Equation::Kind::nlkg_beta: return "nlkg_beta";
  }
  return "?";
}

Equation::Kind equation_kind_from_string(const std::string& name) {
  if (name == "nlkg") return Equation::Kind::nlkg;
  if (name == "nlw") return Equation::Kind::nlw;
  if (name == "nlkg_beta") return Equation::Kind::nlkg_beta;
  throw ValidationError("unknown equation '" + name + "'");
}

std::string to_string(IntegratorSpec::Scheme s) {
  return s == IntegratorSpec::Scheme::rk4 ? "rk4" : "strang_splitting";
}

IntegratorSpec::Scheme scheme_from_string(const std::string& name) {
  if (name == "strang_splitting") return IntegratorSpec::Scheme::strang_splitting;
  if (name == "rk4") return IntegratorSpec::Scheme::rk4;
  throw ValidationError("unknown integrator scheme '" + name + "'");
}

namespace {

// Per-shell rotation coefficients of the linear flow over a fixed time.
class LinearFlow {
 public:
  LinearFlow(const Equation& eq, int max_mode, double t)
      : k_(max_mode), shells_(static_cast<std::size_t>(2 * k_ * k_ + 1)) {
    std::vector<char> done(shells_.size(), 0);
    for (int n2 = 0; n2 <= k_; ++n2)
      for (int n1 = 0; n1 <= k_; ++n1) {
        const std::size_t r2 = static_cast<std::size_t>(n1 * n1 + n2 * n2);
        if (done[r2]) continue;
        done[r2] = 1;
        const double w = std::sqrt(eq.omega_squared(n1, n2));
        Rotation& rot = shells_[r2];
        rot.c = std::cos(t * w);
        if (w == 0.0) {
          rot.su = t;  // sin(tω)/ω → t
          rot.sv = 0.0;
        } else {
          const double s = std::sin(t * w);
          rot.su = s / w;
          rot.sv = -w * s;
        }
      }
  }

  void apply(PhaseState& p) const {
    const int k = p.max_mode();
    auto step = [&](int n1, int n2) {
      const Rotation& rot = shells_[static_cast<std::size_t>(n1 * n1 + n2 * n2)];
      const Complex u = p.u(n1, n2);
      const Complex v = p.v(n1, n2);
      if (n1 == 0 && n2 == 0) {
        p.u.set(0, 0, rot.c * u.real() + rot.su * v.real());
        p.v.set(0, 0, rot.sv * u.real() + rot.c * v.real());
        return;
      }
      p.u.set(n1, n2, rot.c * u + rot.su * v);
      p.v.set(n1, n2, rot.sv * u + rot.c * v);
    };
    if (k > k_) throw std::logic_error("LinearFlow: window too large");
    step(0, 0);
    for (int n1 = 1; n1 <= k; ++n1) step(n1, 0);
    for (int n2 = 1; n2 <= k; ++n2)
      for (int n1 = -k; n1 <= k; ++n1) step(n1, n2);
  }

 private:
  struct Rotation {
    double c = 1.0, su = 0.0, sv = 0.0;
  };
  int k_;
  std::vector<Rotation> shells_;
};

bool all_finite(const PhaseState& p) {
  for (const auto* f : {&p.u, &p.v})
    for (Complex c : f->coeffs())
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

// a + h·b, coefficientwise on a shared window.
PhaseState axpy(const PhaseState& a, double h, const PhaseState& b) {
  SpectralField bu = b.u;
  SpectralField bv = b.v;
  bu *= h;
  bv *= h;
  return {a.u + bu, a.v + bv};
}

PhaseState widen(const PhaseState& p, int n) {
  if (p.max_mode() >= n) return p;
  return {p.u.resized(n), p.v.resized(n)};
}

}  // namespace

PhaseState linear_propagator(const PhaseState& p, double t,
                             const ModelSpec& model) {
  PhaseState out = p;
  LinearFlow(model.equation, p.max_mode(), t).apply(out);
  return out;
}

SpectralField cubic_nonlinearity(const SpectralField& u, int n) {
  const int window = std::max(u.max_mode(), n);
  const SpectralField un = truncate(u, n);
  const int m = cubic_grid(n);
  auto values = to_grid(un, m);
  for (double& x : values) x = x * x * x;
  const SpectralField cube = from_grid(values, m, un.max_mode());
  return truncate(cube, n).resized(window);
}

PhaseState vector_field(const PhaseState& p, const ModelSpec& model) {
  const PhaseState q = widen(p, model.truncation_n);
  const int k = q.max_mode();
  SpectralField dv = cubic_nonlinearity(q.u, model.truncation_n);
  dv *= -1.0;
  for (int n2 = -k; n2 <= k; ++n2)
    for (int n1 = -k; n1 <= k; ++n1) {
      if (n2 < 0 || (n2 == 0 && n1 < 0)) continue;
      const double w2 = model.equation.omega_squared(n1, n2);
      dv.add(n1, n2, n1 == 0 && n2 == 0 ? Complex(-w2 * q.u(0, 0).real())
                                        : -w2 * q.u(n1, n2));
    }
  return {q.v, dv};
}

long step_count(double t_final, double dt) {
  if (t_final == 0.0) return 0;
  return std::max(1L, static_cast<long>(std::ceil(std::abs(t_final) / dt - 1e-9)));
}

PhaseState evolve(const PhaseState& p, double t_final, const ModelSpec& model,
                  const IntegratorSpec& integ, const StepObserver& observer) {
  if (!(integ.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!std::isfinite(t_final)) throw std::invalid_argument("t_final must be finite");
  if (observer) observer(0, 0.0, p);
  if (t_final == 0.0) return p;
  const long steps = step_count(t_final, integ.dt);
  const double h = t_final / static_cast<double>(steps);
  const int n = model.truncation_n;
  PhaseState x = widen(p, n);

  if (integ.scheme == IntegratorSpec::Scheme::strang_splitting) {
    const LinearFlow half(model.equation, x.max_mode(), h / 2.0);
    for (long i = 1; i <= steps; ++i) {
      half.apply(x);
      SpectralField kick = cubic_nonlinearity(x.u, n);
      kick *= -h;
      x.v += kick;
      half.apply(x);
      if (!all_finite(x))
        throw IntegrationError("non-finite state at step " + std::to_string(i), i);
      if (observer) observer(i, h * static_cast<double>(i), x);
    }
    return x;
  }

  for (long i = 1; i <= steps; ++i) {
    const PhaseState k1 = vector_field(x, model);
    const PhaseState k2 = vector_field(axpy(x, h / 2.0, k1), model);
    const PhaseState k3 = vector_field(axpy(x, h / 2.0, k2), model);
    const PhaseState k4 = vector_field(axpy(x, h, k3), model);
    x = axpy(x, h / 6.0, k1);
    x = axpy(x, h / 3.0, k2);
    x = axpy(x, h / 3.0, k3);
    x = axpy(x, h / 6.0, k4);
    if (!all_finite(x))
      throw IntegrationError("non-finite state at step " + std::to_string(i), i);
    if (observer) observer(i, h * static_cast<double>(i), x);
  }
  return x;
}

double truncation_error(const PhaseState& p, double t, int n_small,
                        int n_large, const ModelSpec& model,
                        const IntegratorSpec& integ, double sigma) {
  if (n_small > n_large) throw std::invalid_argument("N_small must be <= N_large");
  ModelSpec small = model;
  small.truncation_n = n_small;
  ModelSpec large = model;
  large.truncation_n = n_large;
  const PhaseState start = widen(p, n_large);
  return sobolev_distance(evolve(start, t, small, integ),
                          evolve(start, t, large, integ), sigma);
}

}  // namespace qiwave
