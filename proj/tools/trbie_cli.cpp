// Batch front end: reads a JSON config, runs one task, writes CSV files.
// Exit status: 0 success, 1 usage or config error, 2 numerical failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trbie/assembly.hpp"
#include "trbie/config.hpp"
#include "trbie/csv.hpp"
#include "trbie/forward.hpp"
#include "trbie/oracle.hpp"
#include "trbie/parallel.hpp"
#include "trbie/selftest.hpp"
#include "trbie/ssm.hpp"

namespace fs = std::filesystem;
using namespace trbie;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

void log(const char* fmt, auto... args) {
  std::fprintf(stderr, "[trbie] ");
  std::fprintf(stderr, fmt, args...);
  std::fputc('\n', stderr);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const char* name(Formulation f) { return f == Formulation::mueller ? "mueller" : "pmchwt"; }
const char* name(KernelMode m) { return m == KernelMode::outgoing ? "outgoing" : "incoming"; }
const char* name(DomainKind d) { return d == DomainKind::waveguide ? "waveguide" : "freespace"; }

void log_problem(const ProblemSpec& spec) {
  log("domain=%s formulation=%s interior_kernel=%s panels=%zu dof=%zu h_max=%.6g", name(spec.domain),
      name(spec.formulation), name(spec.kernel_mode), spec.mesh.size(), 2 * spec.mesh.size(),
      max_panel_length(spec.mesh));
  log("exterior rho=%.6g S=%.6g  interior rho=%.6g S=%.6g", spec.exterior.rho, spec.exterior.shear, spec.interior.rho,
      spec.interior.shear);
}

void write_mesh(const ProblemSpec& spec, const fs::path& dir) {
  CsvWriter w((dir / "mesh.csv").string(), {"scatterer_id", "x_start", "y_start", "x_end", "y_end", "nx", "ny"});
  for (const auto& p : spec.mesh.panels)
    w.row({CsvWriter::cell(p.scatterer), CsvWriter::cell(p.start.x), CsvWriter::cell(p.start.y), CsvWriter::cell(p.end.x),
           CsvWriter::cell(p.end.y), CsvWriter::cell(p.normal.x), CsvWriter::cell(p.normal.y)});
}

int run_eigs(const RunConfig& cfg, const fs::path& dir) {
  const ProblemSpec& spec = cfg.problem;
  const EigsTask& t = *cfg.eigs;
  log_problem(spec);
  log("contour Re(%.6g, %.6g) Im(%.6g, %.6g) nodes/side=%d L=%d m=%d sv_threshold=%.3g residual_threshold=%.3g seed=%llu",
      t.contour.rect.re_min, t.contour.rect.re_max, t.contour.rect.im_min, t.contour.rect.im_max,
      t.contour.nodes_per_side(), t.ssm.L, t.ssm.m, t.ssm.sv_threshold, t.ssm.residual_threshold,
      static_cast<unsigned long long>(t.ssm.seed));
  write_mesh(spec, dir);
  const SystemFn A = [&spec](cplx w) { return assemble(spec, w); };
  const auto t0 = std::chrono::steady_clock::now();
  const SsmOutcome out = ssm_solve(A, static_cast<Eigen::Index>(2 * spec.mesh.size()), t.contour, t.ssm, spec.kernel_mode);
  log("quadrature nodes=%zu hankel rank=%d candidates=%zu certified=%zu time=%.1fs", out.n_nodes, out.extraction.rank,
      out.extraction.candidates.size(), out.eigenvalues.size(), seconds_since(t0));
  CsvWriter w((dir / "eigenvalues.csv").string(), {"re_omega", "im_omega", "residual", "inside_contour", "classification"});
  for (const auto& e : out.eigenvalues)
    w.row({CsvWriter::cell(e.lambda.real()), CsvWriter::cell(e.lambda.imag()), CsvWriter::cell(e.residual),
           CsvWriter::cell(e.inside_contour), CsvWriter::cell(to_string(e.classification))});
  return 0;
}

int run_scan(const RunConfig& cfg, const fs::path& dir) {
  const ProblemSpec& spec = cfg.problem;
  const ScanTask& t = *cfg.scan;
  log_problem(spec);
  const std::vector<double> omegas = t.samples();
  log("scan omega in (%.6g, %.6g), %d midpoint samples, incident mode %d direction %+d", t.omega_min, t.omega_max,
      t.n_samples, t.incident.mode, t.incident.direction);
  write_mesh(spec, dir);
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<EnergyBalance> res(omegas.size());
  parallel_for(omegas.size(), [&](std::size_t i) { res[i] = scan_point(spec, omegas[i], t.incident); });
  double worst = 0.0;
  CsvWriter w((dir / "scan.csv").string(), {"omega", "T", "R", "energy_defect"});
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    w.row({CsvWriter::cell(omegas[i]), CsvWriter::cell(res[i].T), CsvWriter::cell(res[i].R), CsvWriter::cell(res[i].defect())});
    worst = std::max(worst, std::abs(res[i].defect()));
  }
  log("max |T + R - 1| = %.3g, time=%.1fs", worst, seconds_since(t0));
  return 0;
}

int run_forward(const RunConfig& cfg, const fs::path& dir) {
  const ProblemSpec& spec = cfg.problem;
  const ForwardTask& t = *cfg.forward;
  log_problem(spec);
  log("forward omega=%.17g", t.omega);
  write_mesh(spec, dir);
  const DensityPair d = solve_forward(spec, t.omega, t.incident);
  {
    CsvWriter w((dir / "forward.csv").string(), {"panel", "x_mid", "y_mid", "re_u", "im_u", "re_q", "im_q"});
    for (std::size_t i = 0; i < spec.mesh.size(); ++i) {
      const auto j = static_cast<Eigen::Index>(i);
      const Panel& p = spec.mesh.panels[i];
      w.row({CsvWriter::cell(i), CsvWriter::cell(p.mid.x), CsvWriter::cell(p.mid.y), CsvWriter::cell(d.u(j).real()),
             CsvWriter::cell(d.u(j).imag()), CsvWriter::cell(d.q(j).real()), CsvWriter::cell(d.q(j).imag())});
    }
  }
  if (spec.domain == DomainKind::waveguide) {
    const DensityPair sca = scattered_part(spec, t.omega, t.incident, d);
    const auto plus = modal_coefficients(sca, spec, t.omega, Direction::plus);
    const auto minus = modal_coefficients(sca, spec, t.omega, Direction::minus);
    CsvWriter w((dir / "modes.csv").string(), {"side", "l", "re_coeff", "im_coeff"});
    for (const auto* mc : {&plus, &minus})
      for (std::size_t l = 0; l < mc->coeffs.size(); ++l)
        w.row({mc->direction == Direction::plus ? "plus" : "minus", CsvWriter::cell(l), CsvWriter::cell(mc->coeffs[l].real()),
               CsvWriter::cell(mc->coeffs[l].imag())});
    const EnergyBalance e = energy_balance(plus, minus, spec.exterior.wavenumber(t.omega).real(), t.incident);
    log("T=%.12g R=%.12g T+R-1=%.3g", e.T, e.R, e.defect());
  }
  return 0;
}

int run_oracle(const RunConfig& cfg, const fs::path& dir) {
  const OracleTask& t = *cfg.oracle;
  log("oracle r0=%.6g n=%d..%d region Re(%.6g, %.6g) Im(%.6g, %.6g)", t.radius, t.n_min, t.n_max, t.region.re_min,
      t.region.re_max, t.region.im_min, t.region.im_max);
  struct Job {
    CharSpec spec;
    std::vector<cplx> roots;
  };
  std::vector<Job> jobs;
  for (CharKind k : t.kinds)
    for (int n = t.n_min; n <= t.n_max; ++n) {
      Job j;
      j.spec.n = n;
      j.spec.r0 = t.radius;
      j.spec.exterior = cfg.problem.exterior;
      j.spec.interior = cfg.problem.interior;
      j.spec.kind = k;
      j.spec.formulation = t.formulation;
      jobs.push_back(j);
    }
  parallel_for(jobs.size(), [&](std::size_t i) { jobs[i].roots = find_roots(jobs[i].spec, t.region); });
  CsvWriter w((dir / "oracle.csv").string(), {"n", "re_omega", "im_omega", "kind"});
  std::size_t count = 0;
  for (const auto& j : jobs)
    for (const cplx z : j.roots) {
      w.row({CsvWriter::cell(j.spec.n), CsvWriter::cell(z.real()), CsvWriter::cell(z.imag()), CsvWriter::cell(to_string(j.spec.kind))});
      ++count;
    }
  log("%zu roots", count);
  return 0;
}

int run_checks(std::uint64_t seed, const fs::path& dir) {
  const auto checks = run_selftest(seed);
  CsvWriter w((dir / "selftest.csv").string(), {"check", "value", "tolerance", "passed"});
  bool ok = true;
  for (const auto& c : checks) {
    std::printf("%s %s value=%.3e tolerance=%.1e\n", c.passed() ? "PASS" : "FAIL", c.name.c_str(), c.value, c.tolerance);
    w.row({c.name, CsvWriter::cell(c.value), CsvWriter::cell(c.tolerance), CsvWriter::cell(c.passed())});
    ok = ok && c.passed();
  }
  return ok ? 0 : kExitNumerical;
}

int dispatch(Task task, const Options& opt) {
  if (opt.threads < 0) throw ConfigError("--threads: must be non-negative");
  set_num_threads(opt.threads);
  RunConfig cfg;
  if (task == Task::selftest && opt.config.empty()) {
    cfg.task = Task::selftest;
  } else {
    if (opt.config.empty()) throw ConfigError("--config: is required for this subcommand");
    cfg = load_config(opt.config, task);
  }
  if (opt.seed) {
    cfg.seed = *opt.seed;
    if (cfg.eigs) cfg.eigs->ssm.seed = *opt.seed;
  }
  const fs::path dir = !opt.out.empty() ? fs::path(opt.out) : cfg.output_dir.empty() ? fs::path(".") : fs::path(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("--out: cannot create '" + dir.string() + "': " + ec.message());
  log("task=%s threads=%d out=%s", to_string(task), num_threads(), dir.string().c_str());
  switch (task) {
    case Task::eigs: return run_eigs(cfg, dir);
    case Task::scan: return run_scan(cfg, dir);
    case Task::forward: return run_forward(cfg, dir);
    case Task::oracle: return run_oracle(cfg, dir);
    default: return run_checks(cfg.seed, dir);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transmission-problem resonances by boundary integral equations and contour-integral eigensolvers"};
  app.require_subcommand(1);
  Options opt;
  std::optional<Task> chosen;
  const std::pair<const char*, const char*> subs[] = {
      {"eigs", "resonances inside a rectangular contour"},
      {"scan", "waveguide energy transmittance over a frequency range"},
      {"forward", "one scattering solve at real omega"},
      {"oracle", "single-circle characteristic roots"},
      {"selftest", "fast installation checks"},
  };
  for (const auto& [sub_name, help] : subs) {
    CLI::App* s = app.add_subcommand(sub_name, help);
    s->add_option("--config", opt.config, "JSON configuration file");
    s->add_option("--out", opt.out, "output directory");
    s->add_option("--seed", opt.seed, "seed for the SSM probe matrices");
    s->add_option("--threads", opt.threads, "worker threads (0 = hardware concurrency)");
    s->callback([&chosen, n = std::string(sub_name)] { chosen = parse_task(n); });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }
  try {
    return dispatch(*chosen, opt);
  } catch (const ConfigError& e) {
    log("usage error: %s", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    log("numerical failure: %s", e.what());
    return kExitNumerical;
  }
}
