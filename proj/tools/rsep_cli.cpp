// Copyright 2026 The rsep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// rsep command-line entry point.
//
// Exit codes: 0 success, 1 I/O failure, 2 usage/validation/constraint error,
// 3 positivity violation or failed verification, 4 unsupported
// (non-factorizable) instance.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "../vendor/CLI11.hpp"
#include "rsep/rsep.hpp"

namespace {

using namespace rsep;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitPositivity = 3;
constexpr int kExitUnsupported = 4;

constexpr double kMixtureTolerance = 1e-10;

class VerificationFailed : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Writes to @p path, or stdout when it is empty or "-".
void emit(const std::string &path, const json &j) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << "\n";
    } else {
        write_json_file(path, j);
    }
}

json optional_number(double x) {
    return std::isfinite(x) ? json(x) : json(nullptr);
}

std::size_t default_workers() {
    if (const char *env = std::getenv("RSEP_WORKERS")) {
        try {
            return std::max<std::size_t>(1, std::stoul(env));
        } catch (const std::exception &) {
            throw UsageError("RSEP_WORKERS must be a positive integer");
        }
    }
    return 1;
}

InstanceConfig load_instance(const std::string &path,
                             std::optional<double> epsilon) {
    auto cfg = InstanceConfig::load(path);
    if (epsilon) {
        cfg = cfg.with_epsilon(*epsilon);
    }
    return cfg;
}

/// {"povms": [label per site]} or {"uniform": label}.
MeasurementPlan plan_from_json(const json &j, const MeasurementSet &mset,
                               std::size_t n_sites) {
    if (!j.is_object()) {
        throw ValidationError("plan: expected a JSON object");
    }
    MeasurementPlan plan;
    if (j.contains("uniform")) {
        plan = uniform_plan(mset, j.at("uniform").get<std::string>(), n_sites);
    } else if (j.contains("povms")) {
        const auto labels = j.at("povms").get<std::vector<std::string>>();
        plan = plan_from_labels(mset, labels);
    } else {
        throw ValidationError("plan: need 'povms' or 'uniform'");
    }
    validate_plan(plan, mset, n_sites);
    return plan;
}

MeasurementPlan resolve_plan(const std::string &plan_path,
                             const std::string &uniform_label,
                             const PepsInstance &inst) {
    if (!plan_path.empty() && !uniform_label.empty()) {
        throw UsageError("give either --plan or --uniform, not both");
    }
    if (!uniform_label.empty()) {
        return plan_from_json(json{{"uniform", uniform_label}},
                              inst.measurement_set(), inst.n_sites());
    }
    if (plan_path.empty()) {
        throw UsageError("a measurement plan is required (--plan or --uniform)");
    }
    return plan_from_json(read_json_file(plan_path), inst.measurement_set(),
                          inst.n_sites());
}

json plan_to_json(const MeasurementPlan &plan, const MeasurementSet &mset) {
    json labels = json::array();
    for (std::size_t i : plan.povm_index) {
        labels.push_back(mset.povm(i).label());
    }
    return {{"povms", labels}};
}

nlohmann::ordered_json shot_to_json(const ShotRecord &rec, bool with_hidden) {
    nlohmann::ordered_json j{{"shot", rec.shot}, {"outcomes", rec.outcomes}};
    if (with_hidden) {
        j["hidden"] = rec.hidden;
    }
    return j;
}

std::vector<ShotRecord> read_shots(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    std::vector<ShotRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        try {
            const auto j = json::parse(line);
            ShotRecord rec;
            rec.shot = j.at("shot").get<std::uint64_t>();
            rec.outcomes = j.at("outcomes").get<std::vector<std::size_t>>();
            if (j.contains("hidden")) {
                rec.hidden = j.at("hidden").get<std::vector<std::size_t>>();
            }
            out.push_back(std::move(rec));
        } catch (const json::exception &e) {
            throw ValidationError(path + ":" + std::to_string(line_no) + ": " +
                                  e.what());
        }
    }
    return out;
}

void check_shot_shape(const std::vector<ShotRecord> &shots,
                      const std::vector<std::size_t> &arities) {
    for (const auto &rec : shots) {
        if (rec.outcomes.size() != arities.size()) {
            throw ValidationError("shot " + std::to_string(rec.shot) +
                                  ": outcome count differs from the site count");
        }
        for (std::size_t s = 0; s < arities.size(); ++s) {
            if (rec.outcomes[s] >= arities[s]) {
                throw ValidationError("shot " + std::to_string(rec.shot) +
                                      ": outcome out of range");
            }
        }
    }
}

json witness_to_json(const PepsInstance &inst, const PositivityWitness &w) {
    json j{{"site", w.site}, {"tuple", w.tuple}, {"value", w.value}};
    if (w.element) {
        j["povm"] = inst.measurement_set().povm(w.element->povm).label();
        j["element"] = w.element->element;
    } else {
        j["povm"] = nullptr;
        j["element"] = nullptr;
        j["reason"] = "output trace below floor";
    }
    return j;
}

// ---- basis ----

int basis_gen(std::size_t bond_dim, const std::string &anchor,
              const std::string &construction, const std::string &out) {
    if (construction == "phase_point") {
        if (bond_dim != 2) {
            throw UsageError("the phase-point basis needs --D 2");
        }
        emit(out, basis_to_json(phase_point_basis()));
        return kExitOk;
    }
    if (construction != "aligned") {
        throw UsageError("--construction must be aligned or phase_point");
    }
    emit(out, basis_to_json(build_aligned_basis(bond_dim,
                                                anchor_from_name(anchor, bond_dim))));
    return kExitOk;
}

int basis_verify(const std::string &path, const std::string &out) {
    const auto file = basis_file_from_json(read_json_file(path));
    const auto report = inspect_basis(file.bond_dim, file.elements, file.anchor);
    json j{{"D", file.bond_dim},
           {"element_count", report.element_count},
           {"gram_error", report.gram_error},
           {"reconstruction_error", report.reconstruction_error},
           {"ok", report.ok}};
    j["min_anchor_overlap"] =
        report.min_anchor_overlap ? json(*report.min_anchor_overlap) : json(nullptr);
    j["max_anchor_overlap"] =
        report.max_anchor_overlap ? json(*report.max_anchor_overlap) : json(nullptr);
    if (!report.ok) {
        j["problem"] = report.problem;
    }
    emit(out, j);
    if (!report.ok) {
        std::cerr << "rsep: basis invalid: " << report.problem << "\n";
        return kExitUsage;
    }
    return kExitOk;
}

// ---- dual ----

int dual_margin_cmd(const std::string &state, const std::string &op_path,
                    const std::string &measurements, bool require_strict,
                    const std::string &out) {
    if (state.empty() == op_path.empty()) {
        throw UsageError("give exactly one of --state or --op");
    }
    const auto mset = resolve_measurement_set(json(measurements), ".");
    const HermitianOperator op =
        state.empty() ? hermitian_from_json(read_json_file(op_path))
                      : state_from_spec(json(state)).projector();
    const auto m = dual_margin(op, mset);
    const auto &worst = mset.povm(m.worst_element.povm);
    json j{{"min_overlap", m.min_overlap},
           {"max_overlap", m.max_overlap},
           {"strict_margin", m.strict_margin},
           {"in_dual", m.in_dual(kProbabilityTolerance)},
           {"strict", m.strict()},
           {"worst_element", {{"povm", worst.label()},
                              {"element", m.worst_element.element}}}};
    emit(out, j);
    if (require_strict && !m.strict()) {
        std::cerr << "rsep: operator is not strictly inside the dual (margin "
                  << m.strict_margin << ")\n";
        return kExitUsage;
    }
    return kExitOk;
}

// ---- lattice ----

int lattice_gen(const std::string &spec, const std::string &out) {
    emit(out, lattice_to_json(lattice_from_spec(spec)));
    return kExitOk;
}

// ---- peps ----

struct BuildArgs {
    std::string lattice;
    std::string basis = "aligned:2:zero";
    std::string measurements;
    std::string psi;
    std::string recipe = "2";
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    std::string out;
};

int peps_build(const BuildArgs &a) {
    json maps{{"epsilon", a.epsilon}, {"seed", a.seed}};
    if (a.recipe == "1" || a.recipe == "2") {
        maps["recipe"] = std::stoi(a.recipe);
    } else if (a.recipe == "identity") {
        maps["recipe"] = "identity";
    } else {
        throw UsageError("--recipe must be 1, 2 or identity");
    }
    json doc{{"lattice", a.lattice},
             {"basis", a.basis},
             {"measurement_set", a.measurements},
             {"site_maps", maps}};
    if (!a.psi.empty()) {
        doc["psi"] = a.psi;
    }
    build_instance(InstanceConfig{doc, "."});
    emit(a.out, doc);
    return kExitOk;
}

int peps_check(const std::string &path, std::optional<double> epsilon,
               const std::string &out) {
    const auto inst = build_instance(load_instance(path, epsilon));
    json j;
    double choi_min = std::numeric_limits<double>::infinity();
    for (const auto &m : inst.maps()) {
        choi_min = std::min(choi_min, choi_check(m));
    }
    j["choi_min_eigenvalue"] = choi_min;
    const auto report = rv_positivity_check(inst);
    j["certified"] = report.certified;
    j["slack"] = optional_number(report.slack);
    j["min_trace"] = optional_number(report.min_trace);
    json margins = json::array();
    for (double m : report.site_min_margin) {
        margins.push_back(optional_number(m));
    }
    j["site_min_margin"] = margins;
    j["witness"] = report.witness ? witness_to_json(inst, *report.witness) : json(nullptr);
    try {
        const auto dist = edge_distribution(inst);
        j["factorizable"] = true;
        j["T"] = dist.norm_squared;
        j["log_T"] = dist.log_norm_squared;
        j["edge_probabilities"] = dist.probabilities;
        j["factors"] = dist.site_factors;
    } catch (const UnsupportedInstance &e) {
        j["factorizable"] = false;
        j["factorization_problem"] = e.what();
    } catch (const PositivityViolation &e) {
        j["factorizable"] = false;
        j["factorization_problem"] = e.what();
    }
    emit(out, j);
    if (choi_min < -kChoiTolerance) {
        std::cerr << "rsep: site map is not completely positive (Choi eigenvalue "
                  << choi_min << ")\n";
        return kExitPositivity;
    }
    if (!report.certified) {
        std::cerr << "rsep: positivity violated: "
                  << witness_to_json(inst, *report.witness).dump() << "\n";
        return kExitPositivity;
    }
    return kExitOk;
}

int peps_epsilon_max(const std::string &path, double eps_hi, std::size_t coarse,
                     double width, const std::string &out) {
    const auto base = InstanceConfig::load(path);
    const auto bracket = max_epsilon_search(
        [&](double e) { return build_instance(base.with_epsilon(e)); }, eps_hi,
        {coarse, width});
    json j{{"low", bracket.low},
           {"high", optional_number(bracket.high)},
           {"bounded", bracket.bounded()},
           {"low_verified", bracket.low_verified},
           {"high_verified", bracket.high_verified},
           {"evaluations", bracket.evaluations},
           {"eps_hi", eps_hi}};
    j["width"] = optional_number(bracket.width());
    emit(out, j);
    return kExitOk;
}

// ---- sample ----

struct RunArgs {
    std::string instance;
    std::string plan;
    std::string uniform;
    std::uint64_t shots = 1000;
    std::uint64_t seed = 0;
    std::size_t workers = 0;
    bool emit_hidden = false;
    std::optional<double> epsilon;
    std::string out;
};

int sample_cmd(const RunArgs &a) {
    const auto inst = build_instance(load_instance(a.instance, a.epsilon));
    const auto plan = resolve_plan(a.plan, a.uniform, inst);
    const LhvSampler sampler(inst, plan);
    std::ofstream file;
    std::ostream *os = &std::cout;
    if (!a.out.empty() && a.out != "-") {
        file.open(a.out);
        if (!file) {
            throw IoError("cannot write '" + a.out + "'");
        }
        os = &file;
    }
    const std::size_t workers = a.workers > 0 ? a.workers : default_workers();
    sampler.run_shots(a.shots, a.seed, workers, a.emit_hidden,
                      [&](ShotRecord &&rec) {
                          *os << shot_to_json(rec, a.emit_hidden).dump() << "\n";
                      });
    os->flush();
    if (!*os) {
        throw IoError("write of shot stream failed");
    }
    return kExitOk;
}

// ---- verify ----

struct VerifyArgs {
    RunArgs run;
    std::string mode = "sampler";
    std::string shots_file;
    double confidence = kDefaultConfidence;
};

int verify_cmd(const VerifyArgs &v) {
    const auto &a = v.run;
    const auto inst = build_instance(load_instance(a.instance, a.epsilon));
    const auto plan = resolve_plan(a.plan, a.uniform, inst);
    const auto &mset = inst.measurement_set();
    json j;
    if (v.mode == "mixture") {
        const auto exact = exact_joint_distribution(assemble_exact_state(inst), mset, plan);
        const auto mix = mixture_joint_distribution(inst, plan);
        const double tv = tv_distance(exact, mix);
        j = {{"tv", tv},
             {"threshold", kMixtureTolerance},
             {"pass", tv <= kMixtureTolerance},
             {"K", exact.size()},
             {"n_shots", 0}};
    } else if (v.mode == "sampler" || v.mode == "independence") {
        const LhvSampler sampler(inst, plan);
        const bool need_hidden = v.mode == "independence";
        std::vector<ShotRecord> shots;
        if (!v.shots_file.empty()) {
            shots = read_shots(v.shots_file);
            check_shot_shape(shots, sampler.arities());
        } else {
            const std::size_t workers = a.workers > 0 ? a.workers : default_workers();
            shots = sampler.run_shots(a.shots, a.seed, workers, need_hidden);
        }
        if (v.mode == "sampler") {
            const auto exact =
                exact_joint_distribution(assemble_exact_state(inst), mset, plan);
            const auto r = frequency_test(shots, exact, v.confidence);
            j = {{"tv", r.tv},         {"threshold", r.threshold}, {"pass", r.pass},
                 {"K", r.outcome_count}, {"n_shots", r.n_shots}};
        } else {
            const auto r = conditional_independence_test(shots, sampler, v.confidence);
            j = {{"tv", r.tv},      {"threshold", r.threshold},
                 {"pass", r.pass},  {"K", r.cells},
                 {"n_shots", r.n_shots}, {"hidden_values", r.hidden_values}};
        }
        j["confidence"] = v.confidence;
    } else {
        throw UsageError("--mode must be mixture, sampler or independence");
    }
    j["mode"] = v.mode;
    j["plan"] = plan_to_json(plan, mset);
    emit(a.out, j);
    if (!j.at("pass").get<bool>()) {
        throw VerificationFailed("verification failed: tv " +
                                 std::to_string(j.at("tv").get<double>()) +
                                 " exceeds threshold " +
                                 std::to_string(j.at("threshold").get<double>()));
    }
    return kExitOk;
}

// ---- bench ----

struct BenchArgs {
    RunArgs run;
    std::vector<std::size_t> sites;
    std::size_t repeats = 3;
};

json lattice_of_size(const json &template_lattice, std::size_t n) {
    std::string kind = "cycle";
    if (template_lattice.is_string()) {
        const auto s = template_lattice.get<std::string>();
        kind = s.substr(0, s.find(':'));
    }
    if (kind == "chain" || kind == "cycle") {
        return kind + ":" + std::to_string(n);
    }
    if (kind == "torus") {
        const auto l = static_cast<std::size_t>(std::llround(std::sqrt(double(n))));
        if (l * l != n) {
            throw UsageError("bench: torus sizes must be perfect squares");
        }
        return "torus:" + std::to_string(l) + "x" + std::to_string(l);
    }
    throw UsageError("bench: template lattice must be a chain, cycle or torus spec");
}

int bench_cmd(const BenchArgs &b) {
    const auto &a = b.run;
    if (b.sites.empty()) {
        throw UsageError("bench: --sites is required");
    }
    const auto base = load_instance(a.instance, a.epsilon);
    const std::size_t workers = a.workers > 0 ? a.workers : default_workers();
    json rows = json::array();
    using clock = std::chrono::steady_clock;
    for (std::size_t n : b.sites) {
        const auto cfg = base.with_lattice(lattice_of_size(base.document.at("lattice"), n));
        const auto t0 = clock::now();
        const auto inst = build_instance(cfg);
        const auto plan = resolve_plan(a.plan, a.uniform, inst);
        const LhvSampler sampler(inst, plan);
        const double setup = std::chrono::duration<double>(clock::now() - t0).count();
        double best = std::numeric_limits<double>::infinity();
        std::uint64_t checksum = 0;
        for (std::size_t r = 0; r < std::max<std::size_t>(1, b.repeats); ++r) {
            checksum = 0;
            const auto t1 = clock::now();
            sampler.run_shots(a.shots, a.seed, workers, false, [&](ShotRecord &&rec) {
                checksum += rec.outcomes.back();
            });
            best = std::min(best,
                            std::chrono::duration<double>(clock::now() - t1).count());
        }
        rows.push_back({{"sites", n},
                        {"edges", inst.lattice().n_edges()},
                        {"shots", a.shots},
                        {"setup_seconds", setup},
                        {"sample_seconds", best},
                        {"shots_per_second", best > 0.0 ? a.shots / best : 0.0},
                        {"checksum", checksum}});
    }
    emit(a.out, json{{"workers", workers}, {"repeats", b.repeats}, {"rows", rows}});
    return kExitOk;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"rsep: R-separable PEPS and local-hidden-variable sampling"};
    app.require_subcommand(1);

    // basis
    auto *basis = app.add_subcommand("basis", "Operator bases for the bonds");
    basis->require_subcommand(1);
    std::size_t bond_dim = 2;
    std::string anchor = "zero";
    std::string construction = "aligned";
    std::string basis_out;
    auto *bgen = basis->add_subcommand("gen", "Write a basis file");
    bgen->add_option("--D", bond_dim, "Bond dimension")->check(CLI::PositiveNumber);
    bgen->add_option("--anchor", anchor, "zero, uniform or plus-diag");
    bgen->add_option("--construction", construction, "aligned or phase_point");
    bgen->add_option("--out", basis_out, "Output file (default stdout)");
    std::string basis_file;
    auto *bver = basis->add_subcommand("verify", "Check a basis file");
    bver->add_option("file", basis_file)->required();
    bver->add_option("--out", basis_out, "Report file (default stdout)");

    // dual
    auto *dual = app.add_subcommand("dual", "Dual-set membership");
    dual->require_subcommand(1);
    std::string dual_state;
    std::string dual_op;
    std::string dual_mset;
    std::string dual_out;
    bool dual_strict = false;
    auto *dmargin = dual->add_subcommand("margin", "Overlap range against M");
    dmargin->add_option("--state", dual_state, "State spec (e.g. diag:2)");
    dmargin->add_option("--op", dual_op, "Hermitian operator file");
    dmargin->add_option("--measurements", dual_mset, "Measurement set name or file")
        ->required();
    dmargin->add_flag("--require-strict", dual_strict,
                      "Exit 2 unless strictly inside the dual");
    dmargin->add_option("--out", dual_out);

    // lattice
    auto *lattice = app.add_subcommand("lattice", "Lattices");
    lattice->require_subcommand(1);
    std::string lattice_spec;
    std::string lattice_out;
    auto *lgen = lattice->add_subcommand("gen", "Write a lattice file");
    lgen->add_option("spec", lattice_spec, "chain:N, cycle:N or torus:LxxLy")
        ->required();
    lgen->add_option("--out", lattice_out);

    // peps
    auto *peps = app.add_subcommand("peps", "PEPS instances");
    peps->require_subcommand(1);
    BuildArgs build;
    auto *pbuild = peps->add_subcommand("build", "Write an instance file");
    pbuild->add_option("--lattice", build.lattice)->required();
    pbuild->add_option("--basis", build.basis, "aligned:D:anchor, phase_point or file");
    pbuild->add_option("--measurements", build.measurements)->required();
    pbuild->add_option("--psi", build.psi, "zero:d, uniform:d, plus-diag, diag:n");
    pbuild->add_option("--recipe", build.recipe, "1, 2 or identity");
    pbuild->add_option("--epsilon", build.epsilon)->check(CLI::NonNegativeNumber);
    pbuild->add_option("--seed", build.seed);
    pbuild->add_option("--out", build.out);
    std::string check_path;
    std::optional<double> check_eps;
    std::string check_out;
    auto *pcheck = peps->add_subcommand("check", "Complete positivity and (R,V)-positivity");
    pcheck->add_option("instance", check_path)->required();
    pcheck->add_option("--epsilon", check_eps, "Override every site's epsilon");
    pcheck->add_option("--out", check_out, "Certificate file (default stdout)");
    std::string emax_path;
    double eps_hi = 1.0;
    std::size_t coarse = 32;
    double width = 1e-4;
    std::string emax_out;
    auto *pemax = peps->add_subcommand("epsilon-max", "Bracket the largest certified epsilon");
    pemax->add_option("instance", emax_path)->required();
    pemax->add_option("--eps-hi", eps_hi)->check(CLI::PositiveNumber);
    pemax->add_option("--coarse-steps", coarse)->check(CLI::PositiveNumber);
    pemax->add_option("--width", width)->check(CLI::PositiveNumber);
    pemax->add_option("--out", emax_out);

    // sample / verify / bench share the run options
    const auto add_run_options = [](CLI::App *cmd, RunArgs &r) {
        cmd->add_option("instance", r.instance)->required();
        cmd->add_option("--plan", r.plan, "Plan file");
        cmd->add_option("--uniform", r.uniform, "Same POVM label at every site");
        cmd->add_option("--shots", r.shots);
        cmd->add_option("--seed", r.seed);
        cmd->add_option("--workers", r.workers, "Threads (default RSEP_WORKERS or 1)");
        cmd->add_option("--epsilon", r.epsilon, "Override every site's epsilon");
        cmd->add_option("--out", r.out);
    };
    RunArgs sample_args;
    auto *sample = app.add_subcommand("sample", "Draw LHV shots as JSON lines");
    add_run_options(sample, sample_args);
    sample->add_flag("--emit-hidden", sample_args.emit_hidden);

    VerifyArgs verify_args;
    auto *verify = app.add_subcommand("verify", "Compare against the exact distribution");
    add_run_options(verify, verify_args.run);
    verify->add_option("--mode", verify_args.mode, "mixture, sampler or independence");
    verify->add_option("--shots-file", verify_args.shots_file, "JSONL from sample");
    verify->add_option("--k", verify_args.confidence, "Confidence multiplier")
        ->check(CLI::PositiveNumber);

    BenchArgs bench_args;
    auto *bench = app.add_subcommand("bench", "Time the sampler across lattice sizes");
    add_run_options(bench, bench_args.run);
    bench->add_option("--sites", bench_args.sites)->delimiter(',')->required();
    bench->add_option("--repeats", bench_args.repeats);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*bgen) {
            return basis_gen(bond_dim, anchor, construction, basis_out);
        }
        if (*bver) {
            return basis_verify(basis_file, basis_out);
        }
        if (*dmargin) {
            return dual_margin_cmd(dual_state, dual_op, dual_mset, dual_strict, dual_out);
        }
        if (*lgen) {
            return lattice_gen(lattice_spec, lattice_out);
        }
        if (*pbuild) {
            return peps_build(build);
        }
        if (*pcheck) {
            return peps_check(check_path, check_eps, check_out);
        }
        if (*pemax) {
            return peps_epsilon_max(emax_path, eps_hi, coarse, width, emax_out);
        }
        if (*sample) {
            return sample_cmd(sample_args);
        }
        if (*verify) {
            return verify_cmd(verify_args);
        }
        if (*bench) {
            return bench_cmd(bench_args);
        }
    } catch (const IoError &e) {
        std::cerr << "rsep: " << e.what() << "\n";
        return kExitIo;
    } catch (const PositivityViolation &e) {
        std::cerr << "rsep: positivity violated: " << e.what() << "\n";
        return kExitPositivity;
    } catch (const VerificationFailed &e) {
        std::cerr << "rsep: " << e.what() << "\n";
        return kExitPositivity;
    } catch (const UnsupportedInstance &e) {
        std::cerr << "rsep: unsupported instance: " << e.what() << "\n";
        return kExitUnsupported;
    } catch (const json::exception &e) {
        std::cerr << "rsep: malformed input: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        std::cerr << "rsep: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
