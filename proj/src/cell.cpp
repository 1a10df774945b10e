#include "twinstat/cell.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <utility>

#include "twinstat/errors.hpp"
#include "twinstat/util.hpp"

namespace twinstat::cells {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool leaf(const CellNetwork& n) {
  return n.kind == ElementKind::Resistor || n.kind == ElementKind::Capacitor;
}

}  // namespace

CellNetwork CellNetwork::resistor(double ohms) {
  return CellNetwork{ElementKind::Resistor, ohms, {}};
}

CellNetwork CellNetwork::capacitor(double farads) {
  return CellNetwork{ElementKind::Capacitor, farads, {}};
}

CellNetwork CellNetwork::series(std::vector<CellNetwork> parts) {
  return CellNetwork{ElementKind::Series, 0.0, std::move(parts)};
}

CellNetwork CellNetwork::parallel(std::vector<CellNetwork> parts) {
  return CellNetwork{ElementKind::Parallel, 0.0, std::move(parts)};
}

void validate(const CellNetwork& net) {
  if (leaf(net)) {
    if (!std::isfinite(net.value) || net.value <= 0.0)
      fail(ErrorCode::InvalidInput,
           "cell element value must be finite and > 0");
    if (!net.children.empty())
      fail(ErrorCode::InvalidInput, "cell leaf element cannot have children");
    return;
  }
  if (net.children.empty())
    fail(ErrorCode::InvalidInput, "series/parallel group needs children");
  for (const CellNetwork& c : net.children) validate(c);
}

bool has_resistive_path(const CellNetwork& net) {
  switch (net.kind) {
    case ElementKind::Resistor:
      return true;
    case ElementKind::Capacitor:
      return false;
    case ElementKind::Series:
      for (const CellNetwork& c : net.children)
        if (!has_resistive_path(c)) return false;
      return true;
    case ElementKind::Parallel:
      for (const CellNetwork& c : net.children)
        if (has_resistive_path(c)) return true;
      return false;
  }
  return false;
}

int capacitor_count(const CellNetwork& net) {
  if (net.kind == ElementKind::Capacitor) return 1;
  int n = 0;
  for (const CellNetwork& c : net.children) n += capacitor_count(c);
  return n;
}

double ComplexImpedance::phase_deg() const {
  return wrap_degrees(std::atan2(value.imag(), value.real()) * 180.0 /
                      std::numbers::pi);
}

namespace {

std::complex<double> impedance_rec(const CellNetwork& net, double w) {
  switch (net.kind) {
    case ElementKind::Resistor:
      return {net.value, 0.0};
    case ElementKind::Capacitor:
      return {0.0, -1.0 / (w * net.value)};
    case ElementKind::Series: {
      std::complex<double> z = 0.0;
      for (const CellNetwork& c : net.children) z += impedance_rec(c, w);
      return z;
    }
    case ElementKind::Parallel: {
      std::complex<double> y = 0.0;
      for (const CellNetwork& c : net.children) y += 1.0 / impedance_rec(c, w);
      return 1.0 / y;
    }
  }
  return 0.0;
}

}  // namespace

ComplexImpedance impedance_at(const CellNetwork& net, double f_hz) {
  validate(net);
  if (!std::isfinite(f_hz) || f_hz <= 0.0)
    fail(ErrorCode::InvalidInput, "excitation frequency must be finite, > 0");
  return ComplexImpedance{impedance_rec(net, kTwoPi * f_hz)};
}

double parallel_rc_magnitude(double r_ohm, double c_farad, double f_hz) {
  if (!std::isfinite(r_ohm) || r_ohm <= 0.0)
    fail(ErrorCode::InvalidInput, "R must be finite and > 0");
  if (!std::isfinite(c_farad) || c_farad < 0.0)
    fail(ErrorCode::InvalidInput, "C must be finite and >= 0");
  if (!std::isfinite(f_hz) || f_hz <= 0.0)
    fail(ErrorCode::InvalidInput, "f must be finite and > 0");
  double wc = kTwoPi * f_hz * c_farad;
  return 1.0 / std::sqrt(1.0 / (r_ohm * r_ohm) + wc * wc);
}

double parallel_rc_phase(double r_ohm, double c_farad, double f_hz) {
  if (!std::isfinite(r_ohm) || r_ohm <= 0.0)
    fail(ErrorCode::InvalidInput, "R must be finite and > 0");
  if (!std::isfinite(c_farad) || c_farad < 0.0)
    fail(ErrorCode::InvalidInput, "C must be finite and >= 0");
  if (!std::isfinite(f_hz) || f_hz <= 0.0)
    fail(ErrorCode::InvalidInput, "f must be finite and > 0");
  return std::atan(-kTwoPi * f_hz * r_ohm * c_farad) * 180.0 /
         std::numbers::pi;
}

// ---------------------------------------------------------------------------
// Time-domain simulation.
//
// The applied waveform is taken as piecewise-linear between samples. The
// network is first normalized (nested same-kind groups flattened), then any
// capacitance sitting directly across the terminals is pulled out and
// handled as c_direct * dv/dt with central differences; the rest has a
// well-posed state model. With one remaining capacitor the scalar state
// equation is integrated exactly under the first-order-hold input; with more
// the per-step trapezoidal companion reduction is used.
// ---------------------------------------------------------------------------

namespace {

struct TNode {
  ElementKind kind;
  double value = 0.0;
  int cap_index = -1;  // depth-first capacitor slot in the original tree
  std::vector<TNode> children;
};

TNode build_tnode(const CellNetwork& net, int& cap_counter) {
  TNode t{net.kind, net.value, -1, {}};
  if (net.kind == ElementKind::Capacitor) t.cap_index = cap_counter++;
  t.children.reserve(net.children.size());
  for (const CellNetwork& c : net.children)
    t.children.push_back(build_tnode(c, cap_counter));
  return t;
}

TNode normalize(TNode n) {
  if (n.children.empty()) return n;
  std::vector<TNode> flat;
  for (TNode& c : n.children) {
    TNode cn = normalize(std::move(c));
    if (cn.kind == n.kind && !cn.children.empty()) {
      for (TNode& gc : cn.children) flat.push_back(std::move(gc));
    } else {
      flat.push_back(std::move(cn));
    }
  }
  if (flat.size() == 1) return std::move(flat.front());
  n.children = std::move(flat);
  return n;
}

struct Split {
  double c_direct = 0.0;
  std::optional<TNode> remainder;
};

// Pulls capacitor-only branches that sit straight across the terminals out
// of the tree. Series groups are extracted only when purely capacitive.
Split split_direct_capacitance(TNode n) {
  switch (n.kind) {
    case ElementKind::Capacitor:
      return {n.value, std::nullopt};
    case ElementKind::Resistor:
      return {0.0, std::move(n)};
    case ElementKind::Series: {
      double inv_sum = 0.0;
      bool all_caps = true;
      for (const TNode& c : n.children) {
        if (c.kind == ElementKind::Capacitor)
          inv_sum += 1.0 / c.value;
        else
          all_caps = false;
      }
      if (all_caps) return {1.0 / inv_sum, std::nullopt};
      return {0.0, std::move(n)};
    }
    case ElementKind::Parallel: {
      Split out;
      std::vector<TNode> keep;
      for (TNode& c : n.children) {
        Split s = split_direct_capacitance(std::move(c));
        out.c_direct += s.c_direct;
        if (s.remainder) keep.push_back(std::move(*s.remainder));
      }
      if (keep.size() == 1) {
        out.remainder = std::move(keep.front());
      } else if (!keep.empty()) {
        out.remainder = TNode{ElementKind::Parallel, 0.0, -1, std::move(keep)};
      }
      return out;
    }
  }
  return {};
}

void collect_caps(TNode& n, std::vector<TNode*>& caps) {
  if (n.kind == ElementKind::Capacitor) caps.push_back(&n);
  for (TNode& c : n.children) collect_caps(c, caps);
}

// Equivalent resistance with every capacitor leaf replaced by `r(cap)`.
template <typename F>
double eq_resistance(const TNode& n, const F& r_of_cap) {
  switch (n.kind) {
    case ElementKind::Resistor:
      return n.value;
    case ElementKind::Capacitor:
      return r_of_cap(n);
    case ElementKind::Series: {
      double r = 0.0;
      for (const TNode& c : n.children) r += eq_resistance(c, r_of_cap);
      return r;
    }
    case ElementKind::Parallel: {
      double g = 0.0;
      for (const TNode& c : n.children) g += 1.0 / eq_resistance(c, r_of_cap);
      return 1.0 / g;
    }
  }
  return 0.0;
}

// Distributes a known terminal voltage down a purely resistive view of the
// tree and reports the branch voltage seen by each capacitor slot. Returns
// the current entering the subtree.
template <typename F, typename Sink>
double distribute(const TNode& n, double u, const F& r_of_cap,
                  const Sink& sink) {
  switch (n.kind) {
    case ElementKind::Resistor:
      return u / n.value;
    case ElementKind::Capacitor:
      sink(n, u);
      return u / r_of_cap(n);
    case ElementKind::Series: {
      double i = u / eq_resistance(n, r_of_cap);
      for (const TNode& c : n.children)
        distribute(c, i * eq_resistance(c, r_of_cap), r_of_cap, sink);
      return i;
    }
    case ElementKind::Parallel: {
      double i = 0.0;
      for (const TNode& c : n.children) i += distribute(c, u, r_of_cap, sink);
      return i;
    }
  }
  return 0.0;
}

// Piecewise-linear derivative, second-order at interior points and ends.
std::vector<double> derivative(std::span<const double> v, double dt) {
  std::vector<double> d(v.size(), 0.0);
  std::size_t n = v.size();
  if (n < 2) return d;
  if (n == 2) {
    d[0] = d[1] = (v[1] - v[0]) / dt;
    return d;
  }
  d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dt);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * dt);
  d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * dt);
  return d;
}

// 1 - (1 - exp(-q))/q, stable for small q.
double foh_ramp_weight(double q) {
  if (q < 1e-4) return q / 2.0 - q * q / 6.0 + q * q * q / 24.0;
  return 1.0 - (-std::expm1(-q)) / q;
}

struct FohModel {
  double a, b;      // i_port = a*v + b*x
  double alpha, tau;  // dx/dt = (alpha*v - x)/tau
  bool valid = false;
};

FohModel fit_single_cap_model(const TNode& root, double c_farad) {
  auto solve = [&](double r_sub, double& cap_u) {
    auto r_of_cap = [&](const TNode&) { return r_sub; };
    double u = 0.0;
    double i =
        distribute(root, 1.0, r_of_cap, [&](const TNode&, double uc) { u = uc; });
    cap_u = u;
    return i;
  };
  double ua = 0.0, ub = 0.0;
  double ia = solve(1.0, ua);
  double ib = solve(2.0, ub);
  double denom = ua - ub;
  FohModel m;
  if (std::abs(denom) < 1e-12 * (std::abs(ua) + std::abs(ub) + 1e-300))
    return m;  // capacitor slot voltage insensitive to its impedance
  double g2 = (ua / 1.0 - ub / 2.0) / denom;
  double g1 = ua - g2 * ua;
  m.b = (ia - ib) / denom;
  m.a = ia - m.b * ua;
  if (!(g2 < 0.0)) return m;
  m.tau = -c_farad / g2;
  m.alpha = -g1 / g2;
  m.valid = true;
  return m;
}

std::vector<double> simulate_single_cap(const TNode& root, double c_farad,
                                        std::span<const double> v, double dt,
                                        double x0, const FohModel& m) {
  (void)root;
  std::vector<double> i(v.size());
  double q = dt / m.tau;
  double e = std::exp(-q);
  double step_w = -std::expm1(-q);  // 1 - e
  double ramp_w = foh_ramp_weight(q);
  double x = x0;
  for (std::size_t n = 0; n < v.size(); ++n) {
    i[n] = m.a * v[n] + m.b * x;
    if (n + 1 < v.size())
      x = e * x + m.alpha * (v[n] * step_w + (v[n + 1] - v[n]) * ramp_w);
  }
  return i;
}

std::vector<double> simulate_trapezoid(TNode& root, std::span<const double> v,
                                       double dt,
                                       std::span<const double> x_init) {
  std::vector<TNode*> caps;
  collect_caps(root, caps);
  std::vector<double> x(caps.size(), 0.0), ic(caps.size(), 0.0);
  for (std::size_t k = 0; k < caps.size(); ++k) {
    int idx = caps[k]->cap_index;
    if (idx >= 0 && static_cast<std::size_t>(idx) < x_init.size())
      x[k] = x_init[idx];
  }
  // slot lookup by node pointer
  auto slot_of = [&](const TNode& n) {
    for (std::size_t k = 0; k < caps.size(); ++k)
      if (caps[k] == &n) return k;
    return std::size_t{0};
  };

  std::vector<double> out(v.size());
  std::vector<double> vsrc(caps.size(), 0.0), rcomp(caps.size(), 0.0);
  for (std::size_t n = 0; n < v.size(); ++n) {
    bool backward_euler = (n == 0);  // no companion current history yet
    for (std::size_t k = 0; k < caps.size(); ++k) {
      double c = caps[k]->value;
      if (backward_euler) {
        rcomp[k] = dt / c;
        vsrc[k] = x[k];
      } else {
        rcomp[k] = dt / (2.0 * c);
        vsrc[k] = x[k] + rcomp[k] * ic[k];
      }
    }
    auto r_of_cap = [&](const TNode& cn) { return rcomp[slot_of(cn)]; };
    // Thevenin source per subtree for this step.
    auto open_voltage = [&](auto&& self, const TNode& nd) -> double {
      switch (nd.kind) {
        case ElementKind::Resistor:
          return 0.0;
        case ElementKind::Capacitor:
          return vsrc[slot_of(nd)];
        case ElementKind::Series: {
          double s = 0.0;
          for (const TNode& c : nd.children) s += self(self, c);
          return s;
        }
        case ElementKind::Parallel: {
          double g = 0.0, gv = 0.0;
          for (const TNode& c : nd.children) {
            double rc = eq_resistance(c, r_of_cap);
            g += 1.0 / rc;
            gv += self(self, c) / rc;
          }
          return gv / g;
        }
      }
      return 0.0;
    };
    auto solve = [&](auto&& self, const TNode& nd, double u) -> double {
      switch (nd.kind) {
        case ElementKind::Resistor:
          return u / nd.value;
        case ElementKind::Capacitor: {
          std::size_t k = slot_of(nd);
          double cur = (u - vsrc[k]) / rcomp[k];
          x[k] = u;
          ic[k] = cur;
          return cur;
        }
        case ElementKind::Series: {
          double i =
              (u - open_voltage(open_voltage, nd)) / eq_resistance(nd, r_of_cap);
          for (const TNode& c : nd.children) {
            double uc = open_voltage(open_voltage, c) +
                        i * eq_resistance(c, r_of_cap);
            self(self, c, uc);
          }
          return i;
        }
        case ElementKind::Parallel: {
          double i = 0.0;
          for (const TNode& c : nd.children) i += self(self, c, u);
          return i;
        }
      }
      return 0.0;
    };
    out[n] = solve(solve, root, v[n]);
  }
  return out;
}

}  // namespace

std::vector<double> time_domain_current(
    const CellNetwork& net, std::span<const double> voltage_v,
    double sample_rate_hz, std::span<const double> initial_capacitor_voltages) {
  validate(net);
  if (voltage_v.empty())
    fail(ErrorCode::InvalidInput, "voltage waveform must be non-empty");
  if (!std::isfinite(sample_rate_hz) || sample_rate_hz <= 0.0)
    fail(ErrorCode::InvalidInput, "sample rate must be finite and > 0");
  if (!has_resistive_path(net))
    fail(ErrorCode::UnsupportedTopology,
         "network has no resistive conduction path");

  const double dt = 1.0 / sample_rate_hz;
  int cap_counter = 0;
  TNode tree = normalize(build_tnode(net, cap_counter));
  Split s = split_direct_capacitance(std::move(tree));

  std::vector<double> i(voltage_v.size(), 0.0);
  if (s.remainder) {
    std::vector<TNode*> caps;
    collect_caps(*s.remainder, caps);
    if (caps.empty()) {
      double r = eq_resistance(*s.remainder, [](const TNode&) { return 0.0; });
      for (std::size_t n = 0; n < voltage_v.size(); ++n) i[n] = voltage_v[n] / r;
    } else if (caps.size() == 1) {
      FohModel m = fit_single_cap_model(*s.remainder, caps[0]->value);
      if (m.valid) {
        double x0 = 0.0;
        int idx = caps[0]->cap_index;
        if (idx >= 0 &&
            static_cast<std::size_t>(idx) < initial_capacitor_voltages.size())
          x0 = initial_capacitor_voltages[idx];
        i = simulate_single_cap(*s.remainder, caps[0]->value, voltage_v, dt, x0,
                                m);
      } else {
        i = simulate_trapezoid(*s.remainder, voltage_v, dt,
                               initial_capacitor_voltages);
      }
    } else {
      i = simulate_trapezoid(*s.remainder, voltage_v, dt,
                             initial_capacitor_voltages);
    }
  }
  if (s.c_direct > 0.0) {
    std::vector<double> dv = derivative(voltage_v, dt);
    for (std::size_t n = 0; n < voltage_v.size(); ++n)
      i[n] += s.c_direct * dv[n];
  }
  return i;
}

}  // namespace twinstat::cells
