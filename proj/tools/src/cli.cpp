#include "netmf_cli/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <new>
#include <sstream>

#include "CLI11.hpp"
#include "netmf/closed_form.hpp"
#include "netmf/embedding_io.hpp"
#include "netmf/errors.hpp"
#include "netmf/eval.hpp"
#include "netmf/factorize.hpp"
#include "netmf/graph.hpp"
#include "netmf/parallel.hpp"
#include "netmf/spectral.hpp"
#include "netmf/walk_sim.hpp"

#ifndef NETMF_VERSION
#define NETMF_VERSION "unknown"
#endif

namespace netmf::cli {

namespace {

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, value);
  return buf;
}

std::string num(double value) { return fmt("%.10g", value); }

// ------------------------------------------------------------------ parsing

void add_common(CLI::App* sub, RunPlan& plan, bool needs_input) {
  auto* in = sub->add_option("--input", plan.input, "edge-list file (src dst [weight])");
  if (needs_input) in->required();
  sub->add_option("--window", plan.window, "window size T")
      ->check(CLI::Range(1, 1 << 20))
      ->capture_default_str();
  sub->add_option("--neg", plan.negative, "negative-sample count b")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--seed", plan.seed, "master seed for all randomness")->capture_default_str();
  sub->add_option("--threads", plan.threads, "worker threads (default: NETMF_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
  sub->add_flag("--deterministic", plan.deterministic, "omit the timestamp from outputs");
  sub->add_flag("--largest-component", plan.largest_component,
                "restrict to the largest connected component");
  sub->add_flag("--drop-isolated", plan.drop_isolated,
                "drop isolated vertices instead of rejecting the graph");
  sub->add_option("--max-dense", plan.max_dense, "largest n allowed on dense paths")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

}  // namespace

const char* to_string(Command command) noexcept {
  switch (command) {
    case Command::kEmbed: return "embed";
    case Command::kClosedForm: return "closed-form";
    case Command::kSimulate: return "simulate";
    case Command::kSpectrum: return "spectrum";
    case Command::kEval: return "eval";
  }
  return "unknown";
}

ParseOutcome parse(const std::vector<std::string>& args) {
  RunPlan plan;
  CLI::App app{"Network embedding as matrix factorization", "netmf"};
  app.set_version_flag("--version", NETMF_VERSION);
  app.require_subcommand(1);

  auto* embed = app.add_subcommand("embed", "factorize the DeepWalk matrix into an embedding");
  add_common(embed, plan, true);
  embed->add_option("--mode", plan.mode, "exact (small T) or approx (rank-h spectral)")
      ->check(CLI::IsMember({"exact", "approx"}))
      ->capture_default_str();
  embed->add_option("--dim", plan.dim, "embedding dimension d")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  auto* rank = embed->add_option("--rank", plan.rank, "eigenpairs h kept by --mode approx")
                   ->check(CLI::PositiveNumber);
  embed->add_option("--ordering", plan.ordering,
                    "eigenpair selection for approx: algebraic or filter (largest |f|)")
      ->check(CLI::IsMember({"algebraic", "filter"}))
      ->capture_default_str();
  embed->add_option("--output", plan.output, "embedding file (vocab written to <output>.vocab)")
      ->required();
  embed->add_flag("--full-precision", plan.full_precision, "17 significant digits");

  auto* closed = app.add_subcommand("closed-form", "dump a closed-form matrix as TSV");
  add_common(closed, plan, true);
  closed->add_option("--model", plan.model, "line, deepwalk, node2vec or pte")
      ->check(CLI::IsMember({"line", "deepwalk", "node2vec", "pte"}))
      ->capture_default_str();
  closed->add_option("--p", plan.p, "node2vec return parameter")->check(CLI::PositiveNumber);
  closed->add_option("--q", plan.q, "node2vec in-out parameter")->check(CLI::PositiveNumber);
  closed->add_option("--doc-word", plan.doc_word, "pte: document-word bipartite edge list");
  closed->add_option("--label-word", plan.label_word, "pte: label-word bipartite edge list");
  closed->add_flag("--log", plan.log_shifted, "emit ln(max(M, 1)) instead of M");
  closed->add_option("--output", plan.output, "TSV file")->required();

  auto* sim = app.add_subcommand("simulate", "Monte-Carlo walk corpus vs. closed form");
  add_common(sim, plan, false);
  sim->add_option("--model", plan.model, "deepwalk or node2vec")
      ->check(CLI::IsMember({"deepwalk", "node2vec"}))
      ->capture_default_str();
  sim->add_option("--walks", plan.walks, "number of walks N")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sim->add_option("--length", plan.length, "walk length L")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sim->add_option("--p", plan.p, "node2vec return parameter")->check(CLI::PositiveNumber);
  sim->add_option("--q", plan.q, "node2vec in-out parameter")->check(CLI::PositiveNumber);
  sim->add_option("--start", plan.start, "first-vertex law: stationary or uniform")
      ->check(CLI::IsMember({"stationary", "uniform"}))
      ->capture_default_str();
  sim->add_option("--report", plan.report, "TSV report (default: stdout)");

  auto* spec = app.add_subcommand("spectrum", "eigenvalues, filtered eigenvalues and bounds");
  add_common(spec, plan, true);
  auto* top = spec->add_option("--top", plan.top, "number of top eigenpairs h")
                  ->check(CLI::PositiveNumber);
  spec->add_flag("--bounds", plan.bounds, "append singular-value and Rayleigh bound tables");
  spec->add_option("--plot-data", plan.plot_data,
                   "TSV with lambda, f(lambda) and interior-matrix eigenvalues (dense)");
  spec->add_option("--output", plan.output, "TSV file (default: stdout)");

  auto* ev = app.add_subcommand("eval", "multi-label classification with one-vs-rest LR");
  ev->add_option("--embedding", plan.embedding, "embedding file")->required();
  ev->add_option("--labels", plan.labels, "label file (vertex label)")->required();
  ev->add_option("--ratios", plan.ratios, "training ratios")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  ev->add_option("--repeats", plan.repeats, "splits per ratio")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ev->add_option("--regularization", plan.regularization, "L2 strength")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  ev->add_option("--seed", plan.seed, "split seed")->capture_default_str();
  ev->add_option("--threads", plan.threads, "worker threads")->check(CLI::NonNegativeNumber);
  ev->add_option("--report", plan.report, "TSV report (default: stdout)");

  ParseOutcome outcome;
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream out;
    std::ostringstream err;
    outcome.exit_code = app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    outcome.message = out.str() + err.str();
    return outcome;
  }

  if (embed->parsed()) {
    plan.command = Command::kEmbed;
    plan.rank_given = rank->count() > 0;
    if (plan.mode == "approx" && !plan.rank_given) {
      outcome.exit_code = kExitUsage;
      outcome.message =
          "embed: --mode approx needs --rank h (number of eigenpairs, e.g. --rank 256)\n";
      return outcome;
    }
    if (plan.mode == "exact" && plan.rank_given)
      warn("--rank is ignored by --mode exact");
  } else if (closed->parsed()) {
    plan.command = Command::kClosedForm;
    if (plan.model == "pte" && (plan.doc_word.empty() || plan.label_word.empty())) {
      outcome.exit_code = kExitUsage;
      outcome.message = "closed-form: --model pte needs --doc-word and --label-word\n";
      return outcome;
    }
  } else if (sim->parsed()) {
    plan.command = Command::kSimulate;
  } else if (spec->parsed()) {
    plan.command = Command::kSpectrum;
    plan.top_given = top->count() > 0;
  } else {
    plan.command = Command::kEval;
  }
  outcome.plan = std::move(plan);
  return outcome;
}

// -------------------------------------------------------------------- running

namespace {

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NETMF_THREADS")) {
    unsigned value = 0;
    const char* end = env + std::char_traits<char>::length(env);
    const auto [ptr, ec] = std::from_chars(env, end, value);
    if (ec == std::errc() && ptr == end) return value;
    warn(std::string("ignoring malformed NETMF_THREADS='") + env + "'");
  }
  return 0;
}

std::vector<std::string> provenance(const RunPlan& plan, const std::string& details) {
  std::vector<std::string> lines;
  lines.push_back(std::string("netmf ") + NETMF_VERSION + " " + to_string(plan.command));
  lines.push_back(details);
  lines.push_back("seed=" + std::to_string(plan.seed));
  if (!plan.deterministic) {
    char buf[64];
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    lines.push_back(std::string("created=") + buf);
  }
  return lines;
}

DenseLimits limits(const RunPlan& plan) {
  DenseLimits l;
  l.max_vertices = plan.max_dense;
  return l;
}

Graph load_graph(const RunPlan& plan, std::ostream& log) {
  if (plan.input.empty()) throw ParameterError("--input is required");
  Graph g = load_edge_list_file(plan.input,
                                plan.drop_isolated ? IsolatedPolicy::kDrop : IsolatedPolicy::kReject);
  if (plan.largest_component) {
    Graph lcc = largest_connected_component(g);
    if (lcc.num_vertices() != g.num_vertices())
      log << "netmf: largest component keeps " << lcc.num_vertices() << " of "
          << g.num_vertices() << " vertices\n";
    return lcc;
  }
  return g;
}

// Writes to `path`, or to stdout when it is empty.
void emit(const std::string& path, const std::function<void(std::ostream&)>& writer) {
  if (path.empty()) {
    writer(std::cout);
    std::cout.flush();
  } else {
    write_file_atomically(path, writer);
  }
}

int run_embed(const RunPlan& plan, std::ostream& log) {
  const Graph g = load_graph(plan, log);
  NetmfOptions opts;
  opts.limits = limits(plan);
  opts.lanczos.seed = plan.seed;
  opts.svd.seed = plan.seed;
  opts.ordering = plan.ordering == "filter" ? EigenOrdering::kFilterMagnitude
                                            : EigenOrdering::kAlgebraic;
  const Embedding e = plan.mode == "exact"
                          ? netmf_exact(g, plan.window, plan.negative, plan.dim, opts)
                          : netmf_approx(g, plan.window, plan.negative, plan.rank, plan.dim, opts);
  EmbeddingWriteOptions wopts;
  wopts.full_precision = plan.full_precision;
  wopts.comments = provenance(plan, e.provenance.describe());
  std::string sv = "singular_values=";
  for (Eigen::Index i = 0; i < e.singular_values.size(); ++i)
    sv += (i ? "," : "") + num(e.singular_values[i]);
  wopts.comments.push_back(sv);
  write_file_atomically(plan.output, [&](std::ostream& out) {
    write_embedding(out, e.vectors, g.vocabulary(), wopts);
  });
  write_file_atomically(plan.output + ".vocab",
                        [&](std::ostream& out) { write_vocabulary(g.vocabulary(), out); });
  log << "netmf: wrote " << e.num_vertices() << "x" << e.dim() << " embedding to "
      << plan.output << '\n';
  return kExitOk;
}

int run_closed_form(const RunPlan& plan, std::ostream& log) {
  ClosedFormMatrix m;
  const DenseLimits lim = limits(plan);
  if (plan.model == "pte") {
    const Graph ww = load_graph(plan, log);
    auto load_bipartite = [&](const std::string& path) {
      std::ifstream in(path);
      if (!in) throw IoError("cannot open '" + path + "'");
      try {
        return load_bipartite_edge_list(in, &ww.vocabulary());
      } catch (const FormatError& e) {
        throw ValidationError(path + ": " + e.what());
      }
    };
    const BipartiteGraph dw = load_bipartite(plan.doc_word);
    const BipartiteGraph lw = load_bipartite(plan.label_word);
    m = pte_matrix(ww, dw, lw, std::nullopt, plan.negative, lim);
  } else {
    const Graph g = load_graph(plan, log);
    if (plan.model == "line") {
      m = line_matrix(g, plan.negative, lim);
    } else if (plan.model == "deepwalk") {
      m = deepwalk_matrix(g, plan.window, plan.negative, lim);
    } else {
      Node2vecOptions opts;
      opts.limits = lim;
      m = node2vec_matrix(g, plan.p, plan.q, plan.window, plan.negative, opts);
    }
  }
  if (plan.log_shifted) m = shifted_log(m);
  std::vector<std::string> extra = provenance(plan, "source=" + plan.input);
  emit(plan.output, [&](std::ostream& out) { write_matrix_tsv(out, m, extra); });
  return kExitOk;
}

int run_simulate(const RunPlan& plan, std::ostream& log) {
  if (plan.input.empty())
    throw ParameterError("simulate needs --input <edge list> to walk on");
  const Graph g = load_graph(plan, log);
  WalkParams params;
  params.walks = plan.walks;
  params.length = plan.length;
  params.window = plan.window;
  params.seed = plan.seed;
  Node2vecOptions nopts;
  nopts.limits = limits(plan);

  CorpusCounts counts;
  WalkTheory theory;
  std::string details;
  if (plan.model == "deepwalk") {
    const StartDistribution start =
        plan.start == "uniform" ? StartDistribution::kUniform : StartDistribution::kStationary;
    counts = deepwalk_corpus(g, params, start);
    theory = deepwalk_theory(g, plan.window, plan.negative);
    details = "model=deepwalk start=" + plan.start;
  } else {
    if (plan.start != "stationary")
      warn("node2vec walks always start from the edge-state stationary law");
    counts = node2vec_corpus(g, plan.p, plan.q, params, nopts);
    theory = node2vec_theory(g, plan.p, plan.q, plan.window, plan.negative, nopts);
    details = "model=node2vec p=" + num(plan.p) + " q=" + num(plan.q);
  }
  details += " N=" + std::to_string(plan.walks) + " L=" + std::to_string(plan.length) +
             " T=" + std::to_string(plan.window) + " b=" + num(plan.negative);
  const ConvergenceReport r = convergence_report(counts, theory);

  emit(plan.report, [&](std::ostream& out) {
    for (const auto& line : provenance(plan, details)) out << "# " << line << '\n';
    out << "metric\toffset\tvalue\n";
    auto row = [&](const char* metric, int offset, const std::string& value) {
      out << metric << '\t' << offset << '\t' << value << '\n';
    };
    row("pairs", 0, std::to_string(counts.total));
    row("joint_l1", 0, fmt("%.10g", r.joint_l1));
    row("joint_max", 0, fmt("%.10g", r.joint_max));
    row("marginal_l1", 0, fmt("%.10g", r.marginal_l1));
    row("pmi_max", 0, fmt("%.10g", r.pmi_max));
    row("pmi_entries", 0, std::to_string(r.pmi_entries));
    for (std::size_t k = 0; k < r.forward_l1.size(); ++k)
      row("forward_l1", static_cast<int>(k + 1), fmt("%.10g", r.forward_l1[k]));
    for (std::size_t k = 0; k < r.backward_l1.size(); ++k)
      row("backward_l1", static_cast<int>(k + 1), fmt("%.10g", r.backward_l1[k]));
  });
  return kExitOk;
}

int run_spectrum(const RunPlan& plan, std::ostream& log) {
  const Graph g = load_graph(plan, log);
  const Index n = g.num_vertices();
  Index h = plan.top;
  if (h > n) {
    if (plan.top_given) throw ParameterError("--top " + std::to_string(h) + " exceeds n = " + std::to_string(n));
    h = n;
  }
  LanczosOptions lopts;
  lopts.seed = plan.seed;
  const EigenPairs pairs = top_eigenpairs(normalized_adjacency(g), h, lopts);

  std::optional<SpectralReport> report;
  if (plan.bounds || !plan.plot_data.empty()) {
    BoundOptions bopts;
    bopts.max_vertices = std::min<Index>(plan.max_dense, 2000);
    report = verify_bounds(g, plan.window, bopts);
  }

  const std::string details = "T=" + std::to_string(plan.window) + " h=" + std::to_string(h) +
                              " n=" + std::to_string(n);
  emit(plan.output, [&](std::ostream& out) {
    for (const auto& line : provenance(plan, details)) out << "# " << line << '\n';
    out << "index\teigenvalue\tfiltered\tresidual\n";
    for (Index i = 0; i < pairs.count(); ++i)
      out << i + 1 << '\t' << fmt("%.12g", pairs.values[i]) << '\t'
          << fmt("%.12g", window_filter(pairs.values[i], plan.window)) << '\t'
          << fmt("%.3g", pairs.residuals[i]) << '\n';
    if (plan.bounds && report) {
      out << "# singular values of (1/T sum P^r) D^-1 against (1/d_min)|f(lambda_p(s))|\n";
      out << "s\tsigma\tbound\n";
      for (Index s = 0; s < n; ++s)
        out << s + 1 << '\t' << fmt("%.12g", report->singular_values[s]) << '\t'
            << fmt("%.12g", report->singular_bounds[s]) << '\n';
      out << "# singular_slack=" << fmt("%.6g", report->singular_slack)
          << " ok=" << (report->singular_ok ? 1 : 0) << '\n';
      out << "# interior_min=" << fmt("%.12g", report->interior_min)
          << " rayleigh_bound=" << fmt("%.12g", report->rayleigh_bound)
          << " slack=" << fmt("%.6g", report->rayleigh_slack)
          << " ok=" << (report->rayleigh_ok ? 1 : 0) << '\n';
    }
  });
  if (!plan.plot_data.empty() && report) {
    write_file_atomically(plan.plot_data, [&](std::ostream& out) {
      out << "index\tlambda\tf_lambda\tinterior_eigenvalue\n";
      for (Index i = 0; i < n; ++i)
        out << i + 1 << '\t' << fmt("%.12g", report->eigenvalues[i]) << '\t'
            << fmt("%.12g", report->filtered[i]) << '\t'
            << fmt("%.12g", report->interior_eigenvalues[i]) << '\n';
    });
  }
  if (report && !report->passed())
    log << "netmf: spectral bound check failed (singular slack "
        << report->singular_slack << ", rayleigh slack " << report->rayleigh_slack << ")\n";
  return kExitOk;
}

int run_eval(const RunPlan& plan, std::ostream& log) {
  const EmbeddingFile emb = read_embedding_file(plan.embedding);
  const LabelSet labels = load_labels_file(plan.labels, emb.vocabulary);
  if (labels.labeled_vertices().empty())
    throw ValidationError("no labeled vertex of '" + plan.labels + "' appears in the embedding");
  EvalConfig cfg;
  cfg.ratios = plan.ratios;
  cfg.repeats = plan.repeats;
  cfg.seed = plan.seed;
  cfg.regularization = plan.regularization;
  const EvalReport report = evaluate(emb.vectors, labels, cfg);
  emit(plan.report, [&](std::ostream& out) {
    const std::string details = "embedding=" + plan.embedding + " labels=" + plan.labels +
                                " repeats=" + std::to_string(plan.repeats);
    for (const auto& line : provenance(plan, details)) out << "# " << line << '\n';
    out << "ratio\tmicro_mean\tmicro_std\tmacro_mean\tmacro_std\n";
    for (const auto& r : report.results)
      out << fmt("%.4g", r.ratio) << '\t' << fmt("%.4f", r.micro_mean) << '\t'
          << fmt("%.4f", r.micro_std) << '\t' << fmt("%.4f", r.macro_mean) << '\t'
          << fmt("%.4f", r.macro_std) << '\n';
  });
  log << "netmf: evaluated " << labels.labeled_vertices().size() << " labeled vertices\n";
  return kExitOk;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage: return kExitUsage;
    case ErrorKind::kIo: return kExitIo;
    case ErrorKind::kValidation: return kExitValidation;
    case ErrorKind::kConvergence: return kExitConvergence;
    case ErrorKind::kCapacity: return kExitCapacity;
    case ErrorKind::kInternal: return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace

int run(const RunPlan& plan, std::ostream& log) {
  set_thread_count(resolve_threads(plan.threads));
  try {
    switch (plan.command) {
      case Command::kEmbed: return run_embed(plan, log);
      case Command::kClosedForm: return run_closed_form(plan, log);
      case Command::kSimulate: return run_simulate(plan, log);
      case Command::kSpectrum: return run_spectrum(plan, log);
      case Command::kEval: return run_eval(plan, log);
    }
  } catch (const Error& e) {
    log << "netmf " << to_string(plan.command) << ": " << to_string(e.kind()) << " error: "
        << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::bad_alloc&) {
    log << "netmf " << to_string(plan.command)
        << ": capacity error: out of memory; try --mode approx or a smaller input\n";
    return kExitCapacity;
  } catch (const std::exception& e) {
    log << "netmf " << to_string(plan.command) << ": internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  ParseOutcome parsed = parse(args);
  if (!parsed.plan) {
    (parsed.exit_code == kExitOk ? out : err) << parsed.message;
    return parsed.exit_code;
  }
  return run(*parsed.plan, err);
}

}  // namespace netmf::cli
