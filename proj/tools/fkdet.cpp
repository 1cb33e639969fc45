// Command-line front end: expression ingestion, experiment configuration,
// convergence harness, structured reports (json/csv/svg).

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fkdet/errors.hpp"
#include "fkdet/estimators.hpp"
#include "fkdet/group.hpp"
#include "fkdet/group_ring.hpp"
#include "fkdet/laurent.hpp"
#include "fkdet/marked.hpp"
#include "fkdet/report.hpp"

namespace {

using namespace fkdet;

std::vector<std::int64_t> parse_int_list(const std::string& text) {
  std::vector<std::int64_t> out;
  const auto range = text.find("..");
  if (range != std::string::npos) {
    const std::int64_t lo = std::stoll(text.substr(0, range));
    const std::int64_t hi = std::stoll(text.substr(range + 2));
    if (hi < lo) throw precondition_error("empty range: " + text);
    for (std::int64_t v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    out.push_back(std::stoll(text.substr(pos, next - pos)));
    pos = next + 1;
  }
  if (out.empty()) throw precondition_error("empty integer list");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    out.push_back(std::stod(text.substr(pos, next - pos)));
    pos = next + 1;
  }
  if (out.empty()) throw precondition_error("empty number list");
  return out;
}

// Model specs: z | zd:<d> | zmod:<n1>[,<n2>...] | cyclic:<r1>,<r2>,... |
// heis | heismod:<n> | table:<path>
Group parse_model(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "z" && args.empty()) return Group::lattice(1);
  if (kind == "zd") return Group::lattice(std::stoll(args));
  if (kind == "zmod") return Group::lattice_mod(parse_int_list(args));
  if (kind == "cyclic") return Group::cyclic_image(parse_int_list(args));
  if (kind == "heis" && args.empty()) return Group::heisenberg();
  if (kind == "heismod") return Group::heisenberg_mod(std::stoll(args));
  if (kind == "table") {
    std::ifstream in(args);
    if (!in) throw io_error("cannot open table file: " + args);
    return Group::from_table_stream(in);
  }
  throw precondition_error("unknown model spec: " + spec);
}

struct CommonOpts {
  std::string out;
  std::string format = "json";
  bool timings = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--out", opts.out, "write records to this file");
  cmd->add_option("--format", opts.format, "output format for --out")
      ->check(CLI::IsMember({"json", "csv", "svg"}));
  cmd->add_flag("--timings", opts.timings,
                "record wall-clock times (off by default so identical runs emit "
                "identical bytes)");
}

void print_table(const std::vector<ReportRecord>& records) {
  std::printf("%-10s %10s %24s %-16s %9s  %s\n", "scheme", "size", "log-estimate",
              "certificate", "excluded", "note");
  for (const ReportRecord& r : records) {
    std::printf("%-10s %10lld %24s %-16s %9lld  %s\n", r.scheme.c_str(),
                static_cast<long long>(r.size),
                r.minus_inf ? "-inf" : format_double(r.log_estimate).c_str(),
                r.certificate.empty() ? "-" : r.certificate.c_str(),
                static_cast<long long>(r.excluded), r.note.c_str());
  }
}

void finish(std::vector<ReportRecord>& records, const CommonOpts& opts, double wall_ms) {
  if (opts.timings)
    for (ReportRecord& r : records) r.wall_ms = wall_ms;
  print_table(records);
  if (opts.out.empty()) return;
  std::ofstream os(opts.out, std::ios::binary);
  if (!os) throw io_error("cannot open output file: " + opts.out);
  if (opts.format == "json")
    emit_json(records, os);
  else if (opts.format == "csv")
    emit_csv(records, os);
  else
    emit_svg(records, os);
  if (!os) throw io_error("failed while writing: " + opts.out);
}

class Stopwatch {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// --- mahler: quadrature always, Jensen for one variable ---------------------

struct MahlerCmd {
  std::string expr;
  std::int64_t grid_n = 0;
  CommonOpts common;

  void run() {
    Stopwatch watch;
    const LaurentPolynomial p = parse_laurent(expr);
    const std::int64_t n =
        grid_n > 0 ? grid_n : (p.dim() == 1 ? 65536 : p.dim() == 2 ? 1024 : 256);
    std::vector<ReportRecord> records;
    records.push_back(to_record(mahler_quadrature(p, n)));
    if (p.dim() == 1) records.push_back(to_record(mahler_jensen(p)));
    finish(records, common, watch.ms());
  }
};

// --- szego: Toeplitz determinant sequence ------------------------------------

struct SzegoCmd {
  std::string expr;
  std::int64_t nmax = 64;
  CommonOpts common;

  void run() {
    Stopwatch watch;
    const SzegoResult seq = szego_sequence(parse_laurent(expr, 1), nmax);
    std::vector<ReportRecord> records;
    for (const SzegoRow& row : seq.rows) {
      ReportRecord root;
      root.scheme = scheme_name(Scheme::toeplitz);
      root.size = row.n;
      root.log_estimate = row.nth_root;
      root.note = "nth-root";
      records.push_back(root);
      ReportRecord ratio = root;
      ratio.log_estimate = row.ratio;
      ratio.note = "ratio";
      records.push_back(ratio);
    }
    finish(records, common, watch.ms());
  }
};

// --- folner: truncation determinants -----------------------------------------

struct FolnerCmd {
  std::string expr;
  std::string model_spec = "z";
  std::string sizes = "4,8,16,32";
  bool selfadjoint = false;
  CommonOpts common;

  void run() {
    Stopwatch watch;
    const Group model = parse_model(model_spec);
    const GroupRingElement g = parse_group_ring(expr, model);
    const PositiveElement f = selfadjoint ? PositiveElement::diagonally_dominant(g)
                                          : PositiveElement::square_of(g);
    std::vector<ReportRecord> records;
    for (const DetEstimate& est :
         folner_det_sequence(model, f, parse_int_list(sizes)))
      records.push_back(to_record(
          est, "one-sided: the limsup of these estimates never exceeds the determinant"));
    finish(records, common, watch.ms());
  }
};

// --- quotient: finite-quotient determinant sequences --------------------------

struct QuotientCmd {
  std::string expr;
  std::string model_spec = "z";
  std::string quotients;
  std::vector<std::string> r_vectors;
  bool certify = false;
  CommonOpts common;

  void run() {
    Stopwatch watch;
    const Group model = parse_model(model_spec);
    const GroupRingElement f = parse_group_ring(expr, model);

    std::vector<Homomorphism> homs;
    std::vector<std::int64_t> labels;
    if (!quotients.empty()) {
      for (std::int64_t n : parse_int_list(quotients)) {
        if (model.kind() == GroupKind::lattice)
          homs.push_back(quotient_hom(
              model, Group::lattice_mod(std::vector<std::int64_t>(
                         static_cast<std::size_t>(model.rank()), n))));
        else if (model.kind() == GroupKind::heisenberg)
          homs.push_back(quotient_hom(model, Group::heisenberg_mod(n)));
        else
          throw precondition_error("quotient indices apply to z/zd/heis models");
        labels.push_back(n);
      }
    }
    for (const std::string& rv : r_vectors) {
      const std::vector<std::int64_t> r = parse_int_list(rv);
      homs.push_back(quotient_hom(model, Group::cyclic_image(r)));
      const LatticeGap q = q_of_r(r);
      labels.push_back(q.infinite || q.capped ? -1 : q.value);
    }
    if (homs.empty()) throw precondition_error("need --quotients or --r-vector");

    std::optional<InvertibilityCertificate> cert;
    if (certify) {
      cert = neumann_certificate(f);
      if (!cert && model.kind() == GroupKind::lattice) cert = wiener_certificate(f, 256);
      if (!cert)
        throw precondition_error(
            "--certify requested but no invertibility certificate was obtained");
    }
    const QuotientSequence seq = quotient_det_sequence(homs, f, cert, labels);
    std::vector<ReportRecord> records;
    for (const DetEstimate& est : seq.estimates) records.push_back(to_record(est, seq.note));
    finish(records, common, watch.ms());
  }
};

// --- lawton: one-variable specializations P_r --------------------------------

struct LawtonCmd {
  std::string expr;
  std::vector<std::string> r_vectors;
  std::int64_t grid_n = 1024;
  CommonOpts common;

  void run() {
    Stopwatch watch;
    const LaurentPolynomial p = parse_laurent(expr);
    if (r_vectors.empty()) throw precondition_error("need at least one --r-vector");
    std::vector<ReportRecord> records;
    records.push_back(to_record(mahler_quadrature(p, grid_n), "reference value"));
    for (const std::string& rv : r_vectors) {
      const std::vector<std::int64_t> r = parse_int_list(rv);
      const LatticeGap q = q_of_r(r);
      const LaurentPolynomial pr = specialize(p, r);
      std::string note = "r=" + rv + " q(r)=";
      note += q.infinite ? "inf" : q.capped ? ">" + std::to_string(q.value)
                                            : std::to_string(q.value);
      if (q.zero_r) note += " (zero r convention)";
      if (pr.zero()) {
        ReportRecord rec;
        rec.scheme = scheme_name(Scheme::jensen);
        rec.minus_inf = true;
        rec.note = note + " (specialization vanished)";
        records.push_back(rec);
        continue;
      }
      ReportRecord rec = to_record(mahler_jensen(pr), note);
      if (!q.infinite && !q.capped) rec.size = q.value;
      records.push_back(rec);
    }
    finish(records, common, watch.ms());
  }
};

// --- markdist: metrics on marked groups ---------------------------------------

struct MarkdistCmd {
  std::string left, right;
  std::int64_t lmax = 10;
  std::string metric = "delta";
  CommonOpts common;

  void run() {
    Stopwatch watch;
    const MarkedGroup a{parse_model(left)};
    const MarkedGroup b{parse_model(right)};
    const MetricResult res = metric == "delta" ? delta_distance(a, b, lmax)
                                               : ball_distance(a, b, lmax);
    ReportRecord rec;
    rec.scheme = metric;
    rec.size = res.level;
    rec.log_estimate = res.distance;
    rec.note = res.exact ? "exact" : "upper bound at budget";
    std::vector<ReportRecord> records{rec};
    finish(records, common, watch.ms());
  }
};

// --- probe: logged experiments, never assertions -------------------------------

struct ProbeCmd {
  std::string which = "noninv";
  std::string expr;
  std::string quotients = "1..16";
  std::string sizes = "4,8,16";
  std::string mesh = "0.0625,0.015625,0.00390625";
  std::string segment = "0,3";
  CommonOpts common;

  void run() {
    Stopwatch watch;
    std::vector<ReportRecord> records;
    if (which == "noninv") {
      const DivergenceProbe probe = probe_noninvertible_quotients(parse_int_list(quotients));
      records.push_back(to_record(probe.record, "value of record"));
      for (const DetEstimate& est : probe.quotients)
        records.push_back(to_record(est, probe.label));
    } else if (which == "shapes") {
      if (expr.empty()) throw precondition_error("probe shapes needs --expr");
      const PositiveElement f =
          PositiveElement::square_of(parse_group_ring(expr, Group::lattice(2)));
      const FolnerShapeProbe probe = probe_folner_shapes(f, parse_int_list(sizes));
      for (const DetEstimate& est : probe.square_boxes)
        records.push_back(to_record(est, probe.label + " [square]"));
      for (const DetEstimate& est : probe.rectangles)
        records.push_back(to_record(est, probe.label + " [rectangle]"));
    } else if (which == "boyd") {
      if (expr.empty()) throw precondition_error("probe boyd needs --expr");
      const std::vector<double> seg = parse_double_list(segment);
      if (seg.size() != 2) throw precondition_error("--segment expects two endpoints");
      const BoydScan scan = boyd_scan(parse_laurent(expr), cplx(seg[0], 0.0),
                                      cplx(seg[1], 0.0), parse_double_list(mesh));
      for (std::size_t i = 0; i < scan.meshes.size(); ++i) {
        ReportRecord rec;
        rec.scheme = "boyd";
        rec.size = std::llround(1.0 / scan.meshes[i]);
        rec.log_estimate = scan.max_jumps[i];
        rec.note = "max adjacent jump (probe, not assertion)";
        records.push_back(rec);
      }
      ReportRecord verdict;
      verdict.scheme = "boyd";
      verdict.size = 0;
      verdict.log_estimate = scan.non_increasing ? 1.0 : 0.0;
      verdict.note = scan.non_increasing ? "jump sequence non-increasing"
                                         : "jump sequence increased under refinement";
      records.push_back(verdict);
    } else {
      throw precondition_error("unknown probe: " + which);
    }
    finish(records, common, watch.ms());
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mahler measures and Fuglede-Kadison determinants"};
  app.require_subcommand(1);
  app.set_config("--config", "", "declarative config file; command-line flags win");

  MahlerCmd mahler;
  CLI::App* mahler_cmd = app.add_subcommand("mahler", "Mahler measure by quadrature/Jensen");
  mahler_cmd->fallthrough();
  mahler_cmd->add_option("--expr", mahler.expr, "Laurent polynomial")->required();
  mahler_cmd->add_option("--grid-N", mahler.grid_n, "per-axis quadrature grid");
  add_common(mahler_cmd, mahler.common);

  SzegoCmd szego;
  CLI::App* szego_cmd = app.add_subcommand("szego", "Toeplitz determinant sequence");
  szego_cmd->fallthrough();
  szego_cmd->add_option("--expr", szego.expr, "nonnegative symbol on the circle")->required();
  szego_cmd->add_option("--nmax", szego.nmax, "largest matrix size");
  add_common(szego_cmd, szego.common);

  FolnerCmd folner;
  CLI::App* folner_cmd = app.add_subcommand("folner", "Folner truncation determinants");
  folner_cmd->fallthrough();
  folner_cmd->add_option("--expr", folner.expr, "group-ring expression")->required();
  folner_cmd->add_option("--model", folner.model_spec, "z | zd:<d> | heis");
  folner_cmd->add_option("--folner-sizes", folner.sizes, "comma list of sizes");
  folner_cmd->add_flag("--selfadjoint", folner.selfadjoint,
                       "treat --expr as the element itself (diagonally dominant) "
                       "instead of squaring it");
  add_common(folner_cmd, folner.common);

  QuotientCmd quotient;
  CLI::App* quotient_cmd = app.add_subcommand("quotient", "finite-quotient determinants");
  quotient_cmd->fallthrough();
  quotient_cmd->add_option("--expr", quotient.expr, "group-ring expression")->required();
  quotient_cmd->add_option("--model", quotient.model_spec, "z | zd:<d> | heis");
  quotient_cmd->add_option("--quotients", quotient.quotients, "indices, e.g. 1..32 or 2,4,8");
  quotient_cmd->add_option("--r-vector", quotient.r_vectors,
                           "cyclic-image quotient r (repeatable)");
  quotient_cmd->add_flag("--certify", quotient.certify,
                         "require an invertibility certificate before equality claims");
  add_common(quotient_cmd, quotient.common);

  LawtonCmd lawton;
  CLI::App* lawton_cmd = app.add_subcommand("lawton", "one-variable specializations P_r");
  lawton_cmd->fallthrough();
  lawton_cmd->add_option("--expr", lawton.expr, "Laurent polynomial")->required();
  lawton_cmd->add_option("--r-vector", lawton.r_vectors, "specialization r (repeatable)");
  lawton_cmd->add_option("--grid-N", lawton.grid_n, "reference quadrature grid");
  add_common(lawton_cmd, lawton.common);

  MarkdistCmd markdist;
  CLI::App* markdist_cmd = app.add_subcommand("markdist", "distances on marked groups");
  markdist_cmd->fallthrough();
  markdist_cmd->add_option("--left", markdist.left, "left model spec")->required();
  markdist_cmd->add_option("--right", markdist.right, "right model spec")->required();
  markdist_cmd->add_option("--lmax", markdist.lmax, "search budget");
  markdist_cmd->add_option("--metric", markdist.metric, "delta | ball")
      ->check(CLI::IsMember({"delta", "ball"}));
  add_common(markdist_cmd, markdist.common);

  ProbeCmd probe;
  CLI::App* probe_cmd = app.add_subcommand("probe", "logged probes (never assertions)");
  probe_cmd->fallthrough();
  probe_cmd->add_option("--probe", probe.which, "noninv | shapes | boyd");
  probe_cmd->add_option("--expr", probe.expr, "expression, when the probe needs one");
  probe_cmd->add_option("--quotients", probe.quotients, "indices for the non-invertible divergence probe");
  probe_cmd->add_option("--folner-sizes", probe.sizes, "sizes for the Folner shape probe");
  probe_cmd->add_option("--mesh", probe.mesh, "mesh list for boyd");
  probe_cmd->add_option("--segment", probe.segment, "segment endpoints for boyd");
  add_common(probe_cmd, probe.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(mahler_cmd)) mahler.run();
    if (app.got_subcommand(szego_cmd)) szego.run();
    if (app.got_subcommand(folner_cmd)) folner.run();
    if (app.got_subcommand(quotient_cmd)) quotient.run();
    if (app.got_subcommand(lawton_cmd)) lawton.run();
    if (app.got_subcommand(markdist_cmd)) markdist.run();
    if (app.got_subcommand(probe_cmd)) probe.run();
  } catch (const parse_error& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return 2;
  } catch (const resource_error& e) {
    std::fprintf(stderr, "resource error: %s\n", e.what());
    return 5;
  } catch (const io_error& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 6;
  } catch (const precondition_error& e) {
    std::fprintf(stderr, "precondition error: %s\n", e.what());
    return 3;
  } catch (const numeric_error& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 4;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
