#include "uio/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "uio/datalog.hpp"
#include "uio/existcheck.hpp"
#include "uio/extended_precision.hpp"
#include "uio/reference_example.hpp"
#include "uio/serialization.hpp"
#include "uio/simlab.hpp"
#include "uio/synth.hpp"

namespace uio::cli {

namespace {

struct RunConfig {
  std::string from_model;
  std::string from_data;
  std::string uio_path;
  std::string out;
  std::string dims;
  std::string gain;
  std::string poles;
  std::string precision = "auto";
  std::uint64_t seed = 0;
  long long T = 0;
  double tol_rank = kDefaultRelativeTolerance;
  double schur_margin = kDefaultSchurMargin;
  double u_bound = reference::kInputBound;
  double d_bound = reference::kDisturbanceBound;
  bool zero_error = false;
  bool corrupt_fixture = false;
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

std::string num(std::complex<double> z) {
  if (z.imag() == 0.0) return num(z.real());
  return num(z.real()) + (z.imag() < 0 ? "-" : "+") + num(std::abs(z.imag())) + "i";
}

std::string list(const std::vector<std::complex<double>>& values) {
  std::string s = "{";
  for (std::size_t i = 0; i < values.size(); ++i) s += (i ? ", " : "") + num(values[i]);
  return s + "}";
}

void print_matrix(std::ostream& out, const std::string& label, const Matrix& m) {
  out << label << " (" << m.rows() << "x" << m.cols() << ")\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << " ";
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << " " << num(m(i, j));
    out << "\n";
  }
}

RankTolerance rank_tolerance(const RunConfig& cfg) {
  RankTolerance tol;
  tol.relative = cfg.tol_rank;
  return tol;
}

SynthesisOptions synthesis_options(const RunConfig& cfg, GainMethod default_gain,
                                   const std::vector<std::complex<double>>& default_poles = {}) {
  SynthesisOptions o;
  o.tol = rank_tolerance(cfg);
  o.schur_margin = cfg.schur_margin;
  o.seed = cfg.seed;
  o.gain = default_gain;
  if (cfg.gain == "place") {
    o.gain = GainMethod::kPlace;
  } else if (cfg.gain == "riccati") {
    o.gain = GainMethod::kRiccati;
  }
  if (!cfg.poles.empty()) {
    if (o.gain != GainMethod::kPlace) throw Error(ErrorCode::kInvalidArgument, "--poles requires --gain place");
    o.poles = parse_poles(cfg.poles);
  } else if (o.gain == GainMethod::kPlace) {
    if (default_poles.empty()) throw Error(ErrorCode::kInvalidArgument, "--gain place requires --poles");
    o.poles = default_poles;
  }
  return o;
}

Dims parse_dims(const std::string& text) {
  std::vector<long long> v;
  std::istringstream is(text);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    std::size_t used = 0;
    long long k = -1;
    try {
      k = std::stoll(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tok.size() || k < 0) {
      throw Error(ErrorCode::kInvalidArgument, "--dims expects n,m,p[,r] with non-negative integers");
    }
    v.push_back(k);
  }
  if (v.size() != 3 && v.size() != 4) throw Error(ErrorCode::kInvalidArgument, "--dims expects n,m,p[,r]");
  Dims d{v[0], v[1], v[2], std::nullopt};
  if (v.size() == 4) d.r = v[3];
  return d;
}

StateSpaceModel load_model(const RunConfig& cfg) {
  if (cfg.from_model.empty()) throw Error(ErrorCode::kInvalidArgument, "a model file is required (--from-model)");
  return parse_model(read_file(cfg.from_model), rank_tolerance(cfg));
}

void emit(std::ostream& out, const RunConfig& cfg, const std::string& document, const std::string& what) {
  if (cfg.out.empty()) {
    out << document;
  } else {
    write_file(cfg.out, document);
    out << what << " written to " << cfg.out << "\n";
  }
}

Vector initial_state(Eigen::Index n, std::uint64_t seed) {
  SampleStream s(seed, static_cast<std::uint32_t>(Stream::kInitialState));
  return uniform_vector(n, -1.0, 1.0, s);
}

// ---------------------------------------------------------------- check

int cmd_check(const RunConfig& cfg, std::ostream& out) {
  const auto model = load_model(cfg);
  ExistenceOptions opts;
  opts.tol = rank_tolerance(cfg);
  opts.schur_margin = cfg.schur_margin;
  opts.seed = cfg.seed;
  opts.synthesis = synthesis_options(cfg, GainMethod::kRiccati);
  const auto rep = exists_uio(model, opts);
  const auto& a = rep.condition_a;
  const auto& b = rep.condition_b;

  out << "model: " << (model.name.empty() ? "(unnamed)" : model.name) << "  n=" << model.n() << " m=" << model.m()
      << " p=" << model.p() << " r=" << model.r() << "\n";
  out << "condition (a): " << (a.holds ? "holds" : "violated") << "  rank [zI-A -E; C F] target " << a.target_rank;
  if (a.normal_rank_deficient) out << ", normal rank " << a.normal_rank;
  out << "\n";
  for (const auto& v : a.violations) {
    out << "  rank drop at z = " << num(v.z) << " (|z| = " << num(std::abs(v.z)) << "): rank " << v.rank
        << (v.boundary ? ", on the unit circle within the margin" : "") << "\n";
  }
  for (const auto& v : a.stable_drops) {
    out << "  stable rank drop at z = " << num(v.z) << " (|z| = " << num(std::abs(v.z)) << ")\n";
  }
  if (!a.note.empty()) out << "  note: " << a.note << "\n";
  out << "condition (b): " << (b.holds ? "holds" : "violated") << "  rank [CE F; F 0] = " << b.block_rank
      << ", rank F + r = " << b.rank_f + b.r << "\n";
  out << "constructive route: " << (rep.constructive_succeeded ? "succeeded" : "failed") << " ("
      << rep.constructive_message << ")\n";
  out << "UIO exists: " << (rep.exists ? "yes" : "no") << "\n";
  if (rep.consistency_alarm) out << "warning: rank conditions and constructive route disagree\n";
  return rep.exists ? kExitOk : kExitNoUio;
}

// ---------------------------------------------------------------- design

void print_design_summary(std::ostream& out, const Design& design) {
  out << "A_uio eigenvalues: " << list(design.diagnostics.spectrum.eigenvalues) << "\n";
  out << "spectral radius: " << num(design.diagnostics.spectrum.spectral_radius) << "\n";
  out << "||Omega V_f - I||: " << num(design.diagnostics.residuals.at("omega_vf_identity")) << "\n";
  out << "kernel rows: " << design.diagnostics.residuals.at("kernel_rows") << "\n";
}

int cmd_design(const RunConfig& cfg, std::ostream& out) {
  if (cfg.from_model.empty() == cfg.from_data.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "give exactly one of --from-model and --from-data");
  }
  const auto opts = synthesis_options(cfg, GainMethod::kRiccati);
  if (!cfg.from_model.empty()) {
    const auto model = load_model(cfg);
    const auto design = design_from_model<double>(model, opts);
    const auto hp_design = design_from_model<HighPrecision>(model.cast<HighPrecision>(), opts);
    const auto check = verify_uio<double>(model, design.uio, kDefaultAcceptorTolerance, cfg.schur_margin);
    out << "route: model\n";
    print_design_summary(out, design);
    out << "acceptor residuals: acc1 " << num(check.acceptor.acc1) << ", acc2 " << num(check.acceptor.acc2)
        << ", acc3 " << num(check.acceptor.acc3) << "\n";
    out << "verified UIO: " << (check.is_uio ? "yes" : "no (" + check.failure + ")") << "\n";
    emit(out, cfg, format_uio(design.uio, &design.diagnostics, &hp_design.uio), "observer");
    return check.is_uio ? kExitOk : kExitInvalid;
  }

  if (cfg.dims.empty()) throw Error(ErrorCode::kInvalidArgument, "--from-data requires --dims n,m,p[,r]");
  Dims dims = parse_dims(cfg.dims);
  const auto data = parse_trajectory(read_file(cfg.from_data));
  if (data.x.rows() != dims.n || data.u.rows() != dims.m || data.y.rows() != dims.p) {
    throw Error(ErrorCode::kDimensionMismatch, "data columns (x " + std::to_string(data.x.rows()) + ", u " +
                                                   std::to_string(data.u.rows()) + ", y " +
                                                   std::to_string(data.y.rows()) + ") disagree with --dims");
  }
  if (dims.r && data.d && data.d->rows() != *dims.r) {
    throw Error(ErrorCode::kDimensionMismatch, "data has " + std::to_string(data.d->rows()) +
                                                   " disturbance columns, --dims says " + std::to_string(*dims.r));
  }
  const auto blocks = build_blocks(data, dims);
  out << "route: data (" << data.length() << " samples)\n";
  if (blocks.D_p) {
    out << "assumption: " << (assumption_holds(blocks, opts.tol) ? "holds" : "does not hold") << "\n";
  } else {
    const auto ex = surrogate_excitation(blocks, opts.tol);
    out << "warning: no disturbance record; the data assumption cannot be checked (rank (X_p; U_p; U_f) = "
        << ex.rank << " of " << ex.target << ")\n";
  }
  const auto design = design_from_data(blocks, opts);
  print_design_summary(out, design);
  emit(out, cfg, format_uio(design.uio, &design.diagnostics), "observer");
  return kExitOk;
}

// ---------------------------------------------------------------- collect

int cmd_collect(const RunConfig& cfg, std::ostream& out) {
  if (cfg.T < 2) throw Error(ErrorCode::kInvalidArgument, "--T must be at least 2");
  const auto model = load_model(cfg);
  const auto data = collect(model, cfg.T, UniformSignal{-cfg.u_bound, cfg.u_bound},
                            UniformSignal{-cfg.d_bound, cfg.d_bound}, initial_state(model.n(), cfg.seed), cfg.seed);
  const auto blocks = build_blocks(data, Dims{model.n(), model.m(), model.p(), model.r()});
  const bool holds = assumption_holds(blocks, rank_tolerance(cfg));
  emit(out, cfg, format_trajectory(data), "trajectory (" + std::to_string(data.length()) + " samples)");
  if (holds) {
    out << "assumption: holds\n";
  } else {
    out << "warning: assumption does not hold; (X_p; U_p; U_f; D_p; D_f) is row rank deficient\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- simulate

RunTrace to_double_trace(const BasicRunTrace<HighPrecision>& t) {
  auto c = [](const Mat<HighPrecision>& m) { return Matrix(m.cast<double>()); };
  return {c(t.x), c(t.u), c(t.d), c(t.y), c(t.z), c(t.x_hat), c(t.e)};
}

template <typename Scalar>
std::pair<BasicRunTrace<Scalar>, RecursionCheck> simulate_in(const BasicStateSpaceModel<Scalar>& model,
                                                             const BasicUioRealization<Scalar>& uio,
                                                             const RunConfig& cfg) {
  const auto n = model.n(), m = model.m(), r = model.r();
  const auto samples = cfg.T + 1;
  SampleStream us(cfg.seed, static_cast<std::uint32_t>(Stream::kInput));
  SampleStream ds(cfg.seed, static_cast<std::uint32_t>(Stream::kDisturbance));
  const Matrix u = realize(UniformSignal{-cfg.u_bound, cfg.u_bound}, m, samples, us);
  const Matrix d = realize(UniformSignal{-cfg.d_bound, cfg.d_bound}, r, samples, ds);
  const Vec<Scalar> x0 = initial_state(n, cfg.seed).template cast<Scalar>();
  Vec<Scalar> z0 = Vec<Scalar>::Zero(n);
  if (cfg.zero_error) {
    z0 = matching_initial_state<Scalar>(model, uio, x0, u.col(0).template cast<Scalar>(), d.col(0).template cast<Scalar>());
  }
  auto trace = run<Scalar>(model, uio, cfg.T, ExplicitSignal{u}, ExplicitSignal{d}, x0, z0, cfg.seed);
  const auto rec = check_error_recursion<Scalar>(trace, uio.A_uio, 1e-10);
  return {std::move(trace), rec};
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  if (cfg.T < 2) throw Error(ErrorCode::kInvalidArgument, "--T must be at least 2");
  if (cfg.uio_path.empty()) throw Error(ErrorCode::kInvalidArgument, "--uio is required");
  const auto model = load_model(cfg);
  const auto doc = parse_uio(read_file(cfg.uio_path));
  std::string precision = cfg.precision;
  if (precision == "auto") precision = doc.extended ? "extended" : "double";
  if (precision != "double" && precision != "extended") {
    throw Error(ErrorCode::kInvalidArgument, "--precision must be auto, double or extended");
  }
  const auto& u = doc.uio;
  if (u.A_uio.rows() != model.n() || u.B_u.cols() != model.m() || u.B_y.cols() != model.p()) {
    throw Error(ErrorCode::kDimensionMismatch, "observer dimensions do not match the model");
  }

  RunTrace trace;
  RecursionCheck rec;
  out << "precision: " << precision << "\n";
  if (precision == "extended") {
    if (!doc.extended) out << "note: observer file has no extended section; its double matrices are used as given\n";
    const auto hp_uio = doc.extended ? *doc.extended : u.cast<HighPrecision>();
    auto [t, c] = simulate_in<HighPrecision>(model.cast<HighPrecision>(), hp_uio, cfg);
    trace = to_double_trace(t);
    rec = c;
  } else {
    auto [t, c] = simulate_in<double>(model, u, cfg);
    trace = std::move(t);
    rec = c;
  }

  const auto stats = convergence_stats(trace);
  const double e0 = trace.e.col(0).norm();
  out << "samples: " << trace.samples() << "\n";
  out << "||e(0)||: " << num(e0) << "\n";
  out << "||e(" << cfg.T << ")||: " << num(stats.final_error_norm) << "\n";
  if (e0 > 0) out << "||e(" << cfg.T << ")|| / ||e(0)||: " << num(stats.final_error_norm / e0) << "\n";
  if (stats.log_decay) {
    out << "decay estimate: log-slope " << num(*stats.log_decay) << " (rate " << num(std::exp(*stats.log_decay))
        << " per step)\n";
  } else {
    out << "decay estimate: undefined (error at numerical zero over the tail)\n";
  }
  out << "error recursion: " << (rec.passed ? "passed" : "FAILED") << " (max residual " << num(rec.max_residual)
      << ")\n";
  if (!cfg.out.empty()) {
    write_file(cfg.out, format_trace(trace));
    out << "trace written to " << cfg.out << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- demo-paper

class Checklist {
 public:
  explicit Checklist(std::ostream& out) : out_(out) {}
  void check(bool ok, const std::string& what) {
    out_ << (ok ? "[pass] " : "[FAIL] ") << what << "\n";
    all_ = all_ && ok;
  }
  void note(const std::string& what) { out_ << "[note] " << what << "\n"; }
  bool all() const { return all_; }

 private:
  std::ostream& out_;
  bool all_ = true;
};

double spectral_norm(const Matrix& m) {
  return m.size() == 0 ? 0.0 : Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

int cmd_demo(const RunConfig& cfg, std::ostream& out) {
  const auto model = reference::model();
  const auto opts = synthesis_options(cfg, GainMethod::kPlace, reference::poles());
  const auto tol = rank_tolerance(cfg);
  const Dims dims{model.n(), model.m(), model.p(), model.r()};
  const Eigen::Index T = cfg.T > 0 ? cfg.T : 50;
  Checklist cl(out);

  out << "== plant\n";
  print_matrix(out, "A", model.A);
  out << "n=" << model.n() << " m=" << model.m() << " p=" << model.p() << " r=" << model.r() << "\n";

  out << "== existence\n";
  ExistenceOptions eo;
  eo.tol = tol;
  eo.schur_margin = cfg.schur_margin;
  eo.seed = cfg.seed;
  eo.synthesis = opts;
  const auto ex = exists_uio(model, eo);
  cl.check(ex.exists, "rank conditions: (a) " + std::string(ex.condition_a.holds ? "holds" : "violated") + ", (b) " +
                          (ex.condition_b.holds ? "holds" : "violated"));
  cl.check(ex.condition_b.block_rank == 2 && ex.condition_b.rank_f + ex.condition_b.r == 2,
           "rank [CE F; F 0] = " + std::to_string(ex.condition_b.block_rank) +
               ", rank F + r = " + std::to_string(ex.condition_b.rank_f + ex.condition_b.r));

  out << "== printed kernel representation\n";
  Matrix psi = reference::printed_psi();
  if (cfg.corrupt_fixture) psi(0, 0) += 1.0;
  const Matrix gamma = consistency_matrix(model);
  const double psi_gamma = max_abs<double>(psi * gamma);
  const double psi_bound = 1e-9 * (1.0 + spectral_norm(gamma));
  cl.check(psi_gamma < psi_bound, "max|Psi Gamma| = " + num(psi_gamma) + " < " + num(psi_bound));
  const auto model_ker = kernel_representation<double>(gamma, dims, opts);
  const auto angles_printed = principal_angles<double>(psi.transpose(), model_ker.psi().transpose(), tol);
  cl.check(angles_printed.front() < 1e-8,
           "largest principal angle, printed Psi vs model kernel: " + num(angles_printed.front()));

  out << "== printed observer\n";
  const auto printed = reference::printed_uio();
  const auto pr = verify_uio<double>(model, printed, 5e-3, cfg.schur_margin);
  cl.check(pr.acceptor.passed(), "acceptor residuals acc1 " + num(pr.acceptor.acc1) + ", acc2 " +
                                     num(pr.acceptor.acc2) + ", acc3 " + num(pr.acceptor.acc3) + " < 5e-3");
  cl.check(pr.spectrum.is_schur, "printed A* is Schur (spectral radius " + num(pr.spectrum.spectral_radius) + ")");
  cl.note("printed A* eigenvalues " + list(pr.spectrum.eigenvalues) + "; stated {0, 0, 0.5}, distance " +
          num(multiset_distance(pr.spectrum.eigenvalues, reference::poles())));
  {
    const auto ker = KernelRep::from_psi(reference::printed_psi(), dims);
    const Matrix omega_bar = left_inverse<double>(ker.V_f, tol);
    const Matrix delta_f = left_null_basis<double>(ker.V_f, tol);
    const Matrix a_bar = omega_bar * ker.V_p;
    const Matrix c_bar = delta_f * ker.V_p;
    const Matrix cpc = reference::printed_c_bar();
    cl.note("Moore-Penrose A_bar vs printed: max diff " + num(max_abs<double>(a_bar - reference::printed_a_bar())));
    cl.note("C_bar' C_bar vs printed: max diff " +
            num(max_abs<double>(Matrix(c_bar.transpose() * c_bar - cpc.transpose() * cpc))));
  }

  out << "== model route\n";
  const auto md = design_from_model<double>(model, opts);
  const auto mv = verify_uio<double>(model, md.uio, kDefaultAcceptorTolerance, cfg.schur_margin);
  cl.check(mv.is_uio, "model-route observer verified (worst acceptor residual " + num(mv.acceptor.worst()) + ")");
  out << "A_uio eigenvalues: " << list(md.diagnostics.spectrum.eigenvalues) << "\n";
  if (opts.gain == GainMethod::kPlace) {
    const double dist = multiset_distance(md.diagnostics.spectrum.eigenvalues, opts.poles);
    cl.check(dist < 1e-6, "spectrum matches requested poles " + list(opts.poles) + " (distance " + num(dist) + ")");
  }

  out << "== data route\n";
  const auto data = collect(model, reference::kExperimentLength,
                            UniformSignal{-reference::kInputBound, reference::kInputBound},
                            UniformSignal{-reference::kDisturbanceBound, reference::kDisturbanceBound},
                            initial_state(model.n(), cfg.seed), cfg.seed);
  const auto blocks = build_blocks(data, dims);
  cl.check(assumption_holds(blocks, tol), "data assumption holds for T = " + std::to_string(data.length()));
  const auto dd = design_from_data(blocks, opts);
  const auto dv = verify_uio<double>(model, dd.uio, kDefaultAcceptorTolerance, cfg.schur_margin);
  cl.check(dv.is_uio, "data-route observer verified (worst acceptor residual " + num(dv.acceptor.worst()) + ")");
  const double spec_gap = multiset_distance(dd.diagnostics.spectrum.eigenvalues, md.diagnostics.spectrum.eigenvalues);
  cl.check(spec_gap < 1e-6, "data and model spectra agree (distance " + num(spec_gap) + ")");
  const auto data_ker = kernel_representation<double>(column_normalized(blocks.Phi), dims, opts);
  const auto angles = principal_angles<double>(data_ker.psi().transpose(), model_ker.psi().transpose(), tol);
  cl.check(angles.front() < 1e-8, "largest principal angle, data vs model kernel: " + num(angles.front()));

  out << "== error dynamics (" << kHighPrecisionDigits << "-digit arithmetic, T = " << T << ")\n";
  const auto hp_model = model.cast<HighPrecision>();
  const auto hp = design_from_model<HighPrecision>(hp_model, opts);
  SampleStream us(cfg.seed, static_cast<std::uint32_t>(Stream::kInput));
  SampleStream ds(cfg.seed, static_cast<std::uint32_t>(Stream::kDisturbance));
  SampleStream ds2(cfg.seed + 1, static_cast<std::uint32_t>(Stream::kDisturbance));
  const Matrix u = realize(UniformSignal{-reference::kInputBound, reference::kInputBound}, model.m(), T + 1, us);
  const Matrix d = realize(UniformSignal{-reference::kDisturbanceBound, reference::kDisturbanceBound}, model.r(),
                           T + 1, ds);
  const Matrix d2 = realize(UniformSignal{-reference::kDisturbanceBound, reference::kDisturbanceBound}, model.r(),
                            T + 1, ds2);
  const Vec<HighPrecision> x0 = initial_state(model.n(), cfg.seed).cast<HighPrecision>();
  const Vec<HighPrecision> z0 = Vec<HighPrecision>::Zero(model.n());
  const auto tr = run<HighPrecision>(hp_model, hp.uio, T, ExplicitSignal{u}, ExplicitSignal{d}, x0, z0, cfg.seed);
  const auto tr2 = run<HighPrecision>(hp_model, hp.uio, T, ExplicitSignal{u}, ExplicitSignal{d2}, x0, z0, cfg.seed);
  const auto rec = check_error_recursion<HighPrecision>(tr, hp.uio.A_uio, 1e-10);
  cl.check(rec.passed, "error recursion residual " + num(rec.max_residual) + " < 1e-10");
  const double swap = max_abs<HighPrecision>(Mat<HighPrecision>(tr.e - tr2.e));
  cl.check(swap < 1e-10, "error trace unchanged by a different disturbance (max difference " + num(swap) + ")");
  std::vector<double> norms;
  for (Eigen::Index t = 0; t <= T; ++t) norms.push_back(to_double(tr.e.col(t).norm()));
  for (Eigen::Index t = 0; t <= T; ++t) out << "  ||e(" << t << ")|| = " << num(norms[t]) << "\n";
  const double e0 = norms.front();
  const double eT = norms.back();
  if (opts.gain == GainMethod::kPlace && multiset_distance(opts.poles, reference::poles()) == 0.0 && T > 2) {
    const double bound = 2.0 * std::pow(0.5, static_cast<double>(T - 2)) * norms[2];
    cl.check(eT <= bound, "||e(T)|| = " + num(eT) + " <= 2 * 0.5^(T-2) * ||e(2)|| = " + num(bound));
  }
  cl.check(eT < 1e-6 * e0, "||e(T)|| / ||e(0)|| = " + num(e0 > 0 ? eT / e0 : 0.0) + " < 1e-6");

  out << (cl.all() ? "all checks passed\n" : "some checks FAILED\n");
  return cl.all() ? kExitOk : kExitCheckFailed;
}

}  // namespace

std::vector<std::complex<double>> parse_poles(const std::string& text) {
  std::vector<std::complex<double>> poles;
  std::istringstream is(text);
  std::string tok;
  auto fail = [&](const std::string& t) {
    return Error(ErrorCode::kInvalidArgument, "cannot read pole \"" + t + "\" (expected a, a+bi or a-bi)");
  };
  auto to_double_strict = [&](const std::string& s, const std::string& whole) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw fail(whole);
    }
    if (used != s.size()) throw fail(whole);
    return v;
  };
  while (std::getline(is, tok, ',')) {
    tok.erase(std::remove_if(tok.begin(), tok.end(), [](unsigned char c) { return std::isspace(c); }), tok.end());
    if (tok.empty()) throw fail(tok);
    if (tok.back() != 'i' && tok.back() != 'j') {
      poles.emplace_back(to_double_strict(tok, tok), 0.0);
      continue;
    }
    const std::string body = tok.substr(0, tok.size() - 1);
    std::size_t split = std::string::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
      if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
        split = k;
        break;
      }
    }
    if (split == std::string::npos) {
      const std::string im = body.empty() || body == "+" || body == "-" ? body + "1" : body;
      poles.emplace_back(0.0, to_double_strict(im, tok));
    } else {
      std::string im = body.substr(split);
      if (im == "+" || im == "-") im += "1";
      poles.emplace_back(to_double_strict(body.substr(0, split), tok), to_double_strict(im, tok));
    }
  }
  if (poles.empty()) throw Error(ErrorCode::kInvalidArgument, "--poles is empty");
  return poles;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Unknown-input observer design from models or recorded data"};
  app.name("uio");
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_tolerances = [&](CLI::App* sub) {
    sub->add_option("--tol-rank", cfg.tol_rank, "relative singular-value threshold for rank decisions")
        ->check(CLI::PositiveNumber);
    sub->add_option("--schur-margin", cfg.schur_margin, "eigenvalues need modulus below 1 - margin")
        ->check(CLI::NonNegativeNumber);
  };
  auto add_gain = [&](CLI::App* sub) {
    sub->add_option("--gain", cfg.gain, "observer gain: riccati or place")
        ->check(CLI::IsMember({"riccati", "place"}));
    sub->add_option("--poles", cfg.poles, "A_uio spectrum for --gain place, e.g. 0,0,0.5 or 0.2+0.1i,0.2-0.1i");
  };

  auto* check = app.add_subcommand("check", "decide whether the model admits a UIO");
  check->add_option("--from-model,model", cfg.from_model, "model file")->required();
  check->add_option("--seed", cfg.seed, "seed of the randomized pencil completion");
  add_tolerances(check);

  auto* design = app.add_subcommand("design", "synthesize a UIO from a model or recorded data");
  design->add_option("--from-model", cfg.from_model, "model file");
  design->add_option("--from-data", cfg.from_data, "trajectory file");
  design->add_option("--dims", cfg.dims, "n,m,p[,r] (required with --from-data)");
  design->add_option("--seed", cfg.seed, "seed for pole placement");
  design->add_option("--out", cfg.out, "observer file (standard output when omitted)");
  add_gain(design);
  add_tolerances(design);

  auto* collect_cmd = app.add_subcommand("collect", "record a seeded offline experiment");
  collect_cmd->add_option("--from-model,model", cfg.from_model, "model file")->required();
  collect_cmd->add_option("--T", cfg.T, "number of samples")->required();
  collect_cmd->add_option("--seed", cfg.seed, "experiment seed");
  collect_cmd->add_option("--u-bound", cfg.u_bound, "inputs are uniform in (-b, b)")->check(CLI::NonNegativeNumber);
  collect_cmd->add_option("--d-bound", cfg.d_bound, "disturbances are uniform in (-b, b)")
      ->check(CLI::NonNegativeNumber);
  collect_cmd->add_option("--out", cfg.out, "trajectory file (standard output when omitted)");
  collect_cmd->add_option("--tol-rank", cfg.tol_rank, "relative singular-value threshold")->check(CLI::PositiveNumber);

  auto* sim = app.add_subcommand("simulate", "run plant and observer together");
  sim->add_option("--from-model,model", cfg.from_model, "model file")->required();
  sim->add_option("--uio", cfg.uio_path, "observer file")->required();
  cfg.T = 0;
  sim->add_option("--T", cfg.T, "number of steps (default 50)");
  sim->add_option("--seed", cfg.seed, "run seed");
  sim->add_option("--u-bound", cfg.u_bound, "inputs are uniform in (-b, b)")->check(CLI::NonNegativeNumber);
  sim->add_option("--d-bound", cfg.d_bound, "disturbances are uniform in (-b, b)")->check(CLI::NonNegativeNumber);
  sim->add_option("--precision", cfg.precision,
                  "auto (extended when the observer file has an extended section), double or extended")
      ->check(CLI::IsMember({"auto", "double", "extended"}));
  sim->add_flag("--zero-error", cfg.zero_error, "start the observer with e(0) = 0");
  sim->add_option("--out", cfg.out, "trace file");

  auto* demo = app.add_subcommand("demo-paper", "reproduce the embedded three-state example end to end");
  demo->add_option("--seed", cfg.seed, "experiment and simulation seed");
  demo->add_option("--T", cfg.T, "simulation steps (default 50)");
  add_gain(demo);
  add_tolerances(demo);
  demo->add_flag("--corrupt-fixture", cfg.corrupt_fixture)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*check) return cmd_check(cfg, out);
    if (*design) return cmd_design(cfg, out);
    if (*collect_cmd) return cmd_collect(cfg, out);
    if (*sim) {
      if (cfg.T == 0) cfg.T = 50;
      return cmd_simulate(cfg, out);
    }
    if (*demo) return cmd_demo(cfg, out);
  } catch (const Error& e) {
    if (e.is_no_uio()) {
      err << "no UIO (" << to_string(e.cause()) << "): " << e.what() << "\n";
      return kExitNoUio;
    }
    err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace uio::cli
