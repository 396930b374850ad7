// Acceptance checks: one PASS/FAIL line per criterion.
//   acceptance                 run every criterion
//   acceptance --criterion N   run criterion N only

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "filmheat/closure.hpp"
#include "filmheat/config.hpp"
#include "filmheat/experiment.hpp"
#include "filmheat/fourier.hpp"
#include "filmheat/linear_analysis.hpp"
#include "filmheat/sweep.hpp"
#include "filmheat/thermal.hpp"
#include "filmheat/time_integration.hpp"
#include "manufactured.hpp"
#include "oracles.hpp"

using namespace filmheat;

namespace {

namespace tol {
constexpr double spectrum = 5e-3;
constexpr double jacobian = 1e-6;
constexpr double theta_phi_band = 0.05;
constexpr double theta_bih0_lo = 0.09;
constexpr double theta_bih0_hi = 0.11;
constexpr double closure = 1e-12;
constexpr double fixed_point = 1e-12;
constexpr double decay = 0.02;
constexpr double steady_profile = 1e-5;
constexpr double eta_ratio_lo = 5.0;
constexpr double eta_ratio_hi = 20.0;
constexpr double low_pe_error = 0.05;
constexpr double min_theta_floor = -0.05;
constexpr double mass_drift = 1e-8;
constexpr double map_low_pe = 0.05;
constexpr double map_ceiling = 0.25;
constexpr double order = 2.0;
constexpr double order_band = 0.3;
constexpr double spectral_drop = 1e2;
}  // namespace tol

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (detail.tellp() > 0) detail << "; ";
    detail << what << (ok ? "" : " [violated]");
  }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// 1
Outcome exact_spectrum() {
  Outcome o;
  const double pe = 1.0;
  const double b0[] = {-2.47, -22.21, -61.69};
  const double binf[] = {-9.87, -39.48, -88.83};
  const auto r0 = relaxation_roots(0.0, 3);
  const auto ri = relaxation_roots(std::numeric_limits<double>::infinity(), 3);
  double worst = 0.0;
  for (int n = 0; n < 3; ++n) {
    worst = std::max(worst, rel(3.0 * pe * exact_damping(r0[n], pe, 0.0), b0[n]));
    worst = std::max(worst, rel(3.0 * pe * exact_damping(ri[n], pe, 0.0), binf[n]));
  }
  o.require(worst < tol::spectrum, "max rel dev " + fmt("%.2e", worst));
  return o;
}

// 2
Outcome jacobian_rates() {
  Outcome o;
  double worst = 0.0;
  for (double bih : {0.0, 1.0, 10.0})
    for (double k : {0.0, 0.5})
      for (ThermalModel m : {ThermalModel::theta, ThermalModel::lin_truncated, ThermalModel::scheid,
                             ThermalModel::theta_phi}) {
        const auto closed = model_damping(m, bih, k);
        const auto numeric = oracle::jacobian_damping(m, bih, k);
        for (std::size_t i = 0; i < closed.size(); ++i) worst = std::max(worst, rel(numeric[i], closed[i]));
      }
  o.require(worst < tol::jacobian, "max rel dev " + fmt("%.2e", worst));
  return o;
}

// 3
Outcome theta_phi_band() {
  Outcome o;
  double worst = 0.0, at = 0.0;
  std::vector<double> grid{0.0};
  for (int i = 0; i <= 400; ++i) grid.push_back(std::pow(10.0, -3.0 + 5.0 * i / 400.0));
  for (double bih : grid) {
    const double l1 = relaxation_roots(bih, 1).front();
    const double e = rel(model_damping(ThermalModel::theta_phi, bih, 0.0)[0], -l1 * l1);
    if (e > worst) {
      worst = e;
      at = bih;
    }
  }
  o.require(worst < tol::theta_phi_band,
            "theta-phi max rel dev " + fmt("%.4f", worst) + " at bih " + fmt("%.3g", at));
  const double l0 = relaxation_roots(0.0, 1).front();
  const double th = rel(model_damping(ThermalModel::theta, 0.0, 0.0)[0], -l0 * l0);
  o.require(th > tol::theta_bih0_lo && th < tol::theta_bih0_hi, "theta dev at bih 0 " + fmt("%.4f", th));
  return o;
}

// 4
Outcome closure_identities() {
  Outcome o;
  double worst = 0.0;
  auto note = [&](double v) { worst = std::max(worst, std::abs(v)); };
  for (double b : {0.0, 0.3, 1.0, 7.5, 100.0}) {
    const WallPolynomial t1 = vtilde1_poly(b), t2 = vtilde2_poly(b);
    const WallPolynomial h1 = vhat1_poly(b), h2 = vhat2_poly();
    for (const WallPolynomial& p : {t1, t2, h1, h2}) {
      note(p.value(0.0));
      note(p.d1(1.0) + b * p.value(1.0));
    }
    note(h1.value(1.0) - 1.0);
    note(h1.d2(1.0));
    note(h2.value(1.0));
    note(h2.d2(1.0) - 1.0);
    Eigen::MatrixXd a(21, 2);
    Eigen::VectorXd r1(21), r2(21);
    for (int i = 0; i <= 20; ++i) {
      const double y = i / 20.0;
      a(i, 0) = t1.value(y);
      a(i, 1) = t2.value(y);
      r1[i] = h1.value(y);
      r2[i] = h2.value(y);
    }
    const auto qr = a.colPivHouseholderQr();
    note((a * qr.solve(r1) - r1).lpNorm<Eigen::Infinity>());
    note((a * qr.solve(r2) - r2).lpNorm<Eigen::Infinity>());
  }
  o.require(worst < tol::closure, "max residual " + fmt("%.2e", worst));
  return o;
}

// 5
Outcome fixed_points() {
  Outcome o;
  const std::size_t nx = 128;
  const Grid1D grid(nx, 30.0, BoundaryKind::periodic);
  double worst = 0.0;
  for (double bi : {0.0, 0.4, 3.0}) {
    const DimensionlessGroups g = simulation_groups(15.0, 266.0, 0.5, 7.0, bi);
    const FlowKinematics kin = FlowKinematics::from(grid, Field::Ones(nx), Field::Constant(nx, 1.0 / 3.0));
    const Field th0 = theta0_field(Field::Ones(nx), bi);
    for (ThermalModel m : {ThermalModel::theta, ThermalModel::lin_truncated, ThermalModel::scheid})
      worst = std::max(worst, rhs_single(m, grid, kin, th0, g).abs().maxCoeff());
    const ThermalRate r = rhs_theta_phi(grid, kin, ThermalState{th0, Field::Zero(nx)}, g);
    worst = std::max({worst, r.dtheta.abs().maxCoeff(), r.dphi.abs().maxCoeff()});
    for (HydroModel h : {HydroModel::vila, HydroModel::ruyer_quil}) {
      const HydroRate hr = hydro_rhs(h, grid, kin, g);
      worst = std::max({worst, hr.dh.abs().maxCoeff(), hr.dq.abs().maxCoeff()});
    }
  }
  o.require(worst < tol::fixed_point, "max |rhs| " + fmt("%.2e", worst));
  return o;
}

// 6
Outcome flat_relaxation() {
  Outcome o;
  const double pe = 1.0, bi = 1.0, eps = 1e-3;
  const DimensionlessGroups g = simulation_groups(15.0, 266.0, 0.0, pe, bi);
  CoupledSimulation sim(DomainSpec::periodic_box(20.0, 64), HydroModel::vila, g);
  sim.add_model(ThermalModel::theta_phi);
  sim.add_fourier(16);
  const Eigen::Index nx = 64;
  const double th0 = 1.0 / (1.0 + bi);
  Field y(2 * nx);
  y << Field::Constant(nx, th0 + eps), Field::Zero(nx);
  sim.set_thermal(0, y);
  const double l1 = relaxation_roots(bi, 1).front();
  const auto& fr = dynamic_cast<const FourierRider&>(sim.rider(1));
  const Eigen::VectorXd& yb = fr.solver().cheb().nodes();
  Eigen::ArrayXXd T(nx, yb.size());
  for (Eigen::Index j = 0; j < yb.size(); ++j)
    T.col(j) = 1.0 + (th0 - 1.0) * yb[j] + eps * std::sin(l1 * yb[j]);
  sim.set_thermal(1, fr.as_vector(T));

  auto deviation = [&](std::size_t k) {
    return (sim.rider(k).surface_theta(sim.thermal(k)) - th0).abs().maxCoeff();
  };
  const double t1 = 1.0, t2 = 3.0;
  sim.run_to_time(t1);
  const double a0 = deviation(0), b0 = deviation(1);
  sim.run_to_time(t2);
  const double model_rate = std::log(deviation(0) / a0) / (t2 - t1);
  const double ref_rate = std::log(deviation(1) / b0) / (t2 - t1);
  const double lp = model_damping(ThermalModel::theta_phi, bi, 0.0)[0] / (3.0 * pe);
  const double le = exact_damping(l1, pe, 0.0);
  const double em = rel(model_rate, lp), er = rel(ref_rate, le);
  o.require(em < tol::decay, "theta-phi rate dev " + fmt("%.2e", em));
  o.require(er < tol::decay, "reference rate dev " + fmt("%.2e", er));
  return o;
}

// 7
Outcome steady_cheb() {
  Outcome o;
  const DimensionlessGroups g = simulation_groups(15.0, 266.0, 0.0, 3.0, 0.8);
  auto error = [&](double eta) {
    const SteadyProfile p = flat_film_steady_cheb(g, 16, eta);
    double e = 0.0;
    for (Eigen::Index i = 0; i < p.T.size(); ++i)
      e = std::max(e, std::abs(p.T[i] - nusselt_temperature(p.ybar[i], 1.0, g.bi)));
    return e;
  };
  const double e6 = error(1e-6), e7 = error(1e-7);
  o.require(e6 < tol::steady_profile, "error at eta 1e-6 " + fmt("%.2e", e6));
  const double ratio = e7 > 0.0 ? e6 / e7 : std::numeric_limits<double>::infinity();
  o.require(ratio > tol::eta_ratio_lo && ratio < tol::eta_ratio_hi,
            "error ratio for eta / 10 " + fmt("%.3g", ratio) + " (linear scaling needs ~10)");
  return o;
}

PairedRunSpec desk_box() {
  PairedRunSpec s;
  s.domain = DomainSpec::periodic_box(90.0, 512);
  s.hydro = HydroModel::vila;
  s.re = 15.0;
  s.we = 266.0;
  s.ct = 0.0;
  return s;
}

// 8
Outcome low_pe() {
  Outcome o;
  PairedRunSpec spec = desk_box();
  spec.models = {ThermalModel::theta, ThermalModel::theta_phi};
  const HydroState flow = spin_up(spec);
  for (double bi : {1.0, 100.0}) {
    const DimensionlessGroups g = simulation_groups(spec.re, spec.we, spec.ct, 1.0, bi);
    const PairedRunResult r = run_paired(spec, g, flow);
    for (std::size_t k = 0; k < 2; ++k)
      o.require(r.riders[k].error_interface < tol::low_pe_error,
                "Bi " + fmt("%g", bi) + " " + r.riders[k].name + " " + fmt("%.4f", r.riders[k].error_interface));
  }
  return o;
}

// 9
Outcome moderate_pe() {
  Outcome o;
  PairedRunSpec spec = desk_box();
  spec.models = {ThermalModel::scheid, ThermalModel::theta, ThermalModel::theta_phi};
  spec.reference = false;
  spec.thermal_time = 2000.0;
  const DimensionlessGroups g = simulation_groups(spec.re, spec.we, spec.ct, 105.0, 0.1 * std::cbrt(45.0));
  const PairedRunResult r = run_paired(spec, g, spin_up(spec));
  const double s = r.riders[0].min_theta, t = r.riders[1].min_theta, tp = r.riders[2].min_theta;
  o.require(s < t && s < tp, "min theta scheid " + fmt("%.4f", s) + " theta " + fmt("%.4f", t) +
                                 " theta-phi " + fmt("%.4f", tp));
  o.require(t > tol::min_theta_floor && tp > tol::min_theta_floor, "new models above -0.05");
  return o;
}

// 10
Outcome conservation() {
  Outcome o;
  PairedRunSpec spec = desk_box();
  const DimensionlessGroups g = simulation_groups(spec.re, spec.we, spec.ct, 1.0, 0.0);
  CoupledSimulation sim(spec.domain, spec.hydro, g);
  sim.set_hydro(initial_flow(spec), 0.0);
  const double m0 = sim.hydro().h.sum();
  sim.run_to_time(400.0);
  const double drift = std::abs(sim.hydro().h.sum() - m0) / m0;
  o.require(drift < tol::mass_drift, "mass drift " + fmt("%.2e", drift));

  SweepPlan plan;
  plan.n_samples = 4;
  plan.seed = 17;
  plan.dims = {{"pe", 3.0, 0.5, 1.0, 10.0}, {"bi", 1.0, 1.0, 0.1, 10.0}};
  PairedRunSpec small;
  small.domain = DomainSpec::periodic_box(30.0, 128);
  small.spinup_time = 20.0;
  small.thermal_time = 5.0;
  small.perturbation = 0.05;
  const auto a = execute_sweep(plan, small, 1);
  const auto b = execute_sweep(plan, small, 4);
  bool same = a.size() == b.size();
  for (std::size_t i = 0; same && i < a.size(); ++i) {
    same = a[i].hydro_hash == b[i].hydro_hash && a[i].rows.size() == b[i].rows.size();
    for (std::size_t k = 0; same && k < a[i].rows.size(); ++k)
      same = a[i].rows[k].error_interface == b[i].rows[k].error_interface &&
             a[i].rows[k].error_wall == b[i].rows[k].error_wall &&
             a[i].rows[k].min_theta == b[i].rows[k].min_theta && a[i].rows[k].nu == b[i].rows[k].nu;
  }
  o.require(same, "1 vs 4 workers bit-identical");
  return o;
}

// 11
Outcome desk_map() {
  Outcome o;
  const RunConfig c = load_config(std::string(FILMHEAT_CONFIGS) + "/sweep_desk.ini");
  const auto out = execute_sweep(c.plan, c.spec, 1);
  std::size_t failed = 0;
  double worst_low = 0.0, worst = 0.0;
  for (const SampleOutcome& s : out) {
    if (!s.ok) {
      ++failed;
      continue;
    }
    for (const ErrorSample& e : s.rows) {
      if (e.model != to_string(ThermalModel::theta_phi)) continue;
      worst = std::max(worst, e.error_interface);
      if (e.pe <= 10.0) worst_low = std::max(worst_low, e.error_interface);
    }
  }
  o.require(failed == 0 && out.size() == c.plan.n_samples,
            std::to_string(out.size() - failed) + "/" + std::to_string(c.plan.n_samples) + " samples completed");
  o.require(worst_low < tol::map_low_pe, "theta-phi max error at Pe <= 10 " + fmt("%.4f", worst_low));
  o.require(worst < tol::map_ceiling, "theta-phi max error " + fmt("%.4f", worst));
  return o;
}

// 12
Outcome convergence() {
  Outcome o;
  const DimensionlessGroups g = simulation_groups(15.0, 266.0, 0.0, 3.0, 1.0);
  auto run = [&](double dt) {
    StepSettings s;
    s.dt_max = dt;
    s.courant = 10.0;
    CoupledSimulation sim(DomainSpec::periodic_box(30.0, 128), HydroModel::ruyer_quil, g, s);
    const Field x = sim.grid().coordinates();
    const Field h = 1.0 + 0.15 * (2.0 * std::numbers::pi / 30.0 * x).sin();
    sim.set_hydro({h, h.cube() / 3.0}, 0.0);
    sim.add_model(ThermalModel::theta_phi);
    sim.run_to_time(4.0);
    Field out(128 * 3);
    out << sim.hydro().h, sim.thermal(0);
    return out;
  };
  const Field a = run(0.04), b = run(0.02), c = run(0.01);
  const double order = std::log2((a - b).abs().maxCoeff() / (b - c).abs().maxCoeff());
  o.require(std::abs(order - tol::order) < tol::order_band, "time order " + fmt("%.3f", order));
  const double drop = manufactured::profile_error(16, g) / manufactured::profile_error(32, g);
  o.require(drop >= tol::spectral_drop, "Chebyshev error drop 16->32 " + fmt("%.3g", drop));
  return o;
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

const std::vector<Criterion> criteria{
    {"exact relaxation spectrum", exact_spectrum},
    {"model damping rates vs Jacobians", jacobian_rates},
    {"theta-phi within 5% of the exact rate", theta_phi_band},
    {"closure polynomial identities", closure_identities},
    {"flat-film fixed points", fixed_points},
    {"flat-film relaxation rates", flat_relaxation},
    {"steady Chebyshev profile and eta scaling", steady_cheb},
    {"low-Pe equivalence with the reference", low_pe},
    {"moderate-Pe min theta ordering", moderate_pe},
    {"mass conservation and determinism", conservation},
    {"desk-scale error map", desk_map},
    {"time and Chebyshev convergence", convergence},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::size_t> which;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      const int n = std::atoi(argv[++i]);
      if (n < 1 || n > static_cast<int>(criteria.size())) {
        std::fprintf(stderr, "criterion must be in 1..%zu\n", criteria.size());
        return 2;
      }
      which.push_back(static_cast<std::size_t>(n));
    } else {
      std::fprintf(stderr, "usage: acceptance [--criterion N]\n");
      return 2;
    }
  }
  if (which.empty())
    for (std::size_t n = 1; n <= criteria.size(); ++n) which.push_back(n);

  bool all = true;
  for (std::size_t n : which) {
    const Criterion& c = criteria[n - 1];
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
      const Outcome o = c.run();
      pass = o.pass;
      detail = o.detail.str();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2zu %s: %s (%.1f s)\n", pass ? "PASS" : "FAIL", n, c.name, detail.c_str(), secs);
    std::fflush(stdout);
    all = all && pass;
  }
  return all ? 0 : 1;
}
