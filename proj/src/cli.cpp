#include "flexbench/cli.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "flexbench/archive.hpp"
#include "flexbench/errors.hpp"
#include "flexbench/experiment.hpp"
#include "flexbench/json_io.hpp"
#include "flexbench/metrics.hpp"
#include "flexbench/nsga2.hpp"
#include "flexbench/operators.hpp"
#include "flexbench/rng.hpp"
#include "flexbench/variants.hpp"

namespace flexbench {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string num(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct Options {
    std::string config_path;
    std::string material;
    std::vector<std::string> materials;
    std::string algo = "baseline";
    std::optional<std::size_t> pop;
    std::optional<std::size_t> gens;
    std::optional<std::size_t> epoch;
    std::optional<std::size_t> gene_length;
    std::optional<std::size_t> runs;
    std::optional<std::uint64_t> seed;
    std::optional<double> threshold;
    std::string out;
    std::optional<std::size_t> threads;

    double speed = ProcessParams{}.cutting_speed;
    double rake = ProcessParams{}.cutting_angle;
    double depth = ProcessParams{}.cutting_depth;
    std::size_t samples = 10000;
    std::string archive;
    std::optional<double> reference;
    std::string references_path;
    std::vector<std::string> reference_overrides;
    bool scratch_only = false;
    bool baseline_only = false;
    std::string dir;
};

ExperimentConfig load_config(const Options& o)
{
    ExperimentConfig c;
    if (!o.config_path.empty()) {
        c = experiment_config_from_json(read_text_file(o.config_path));
    }
    if (!o.materials.empty()) {
        c.materials.clear();
        for (const auto& m : o.materials) {
            c.materials.push_back(canonical_material_name(m));
        }
    }
    if (o.pop) {
        c.algorithm.population_size = *o.pop;
    }
    if (o.gens) {
        c.algorithm.max_generations = *o.gens;
    }
    if (o.epoch) {
        c.epoch_length = *o.epoch;
    }
    if (o.gene_length) {
        c.gene_length = *o.gene_length;
    }
    if (o.runs) {
        c.runs = *o.runs;
    }
    if (o.seed) {
        c.base_seed = *o.seed;
        c.algorithm.seed = *o.seed;
    }
    if (o.threshold) {
        c.threshold = *o.threshold;
    }
    if (!o.out.empty()) {
        c.output_dir = o.out;
    }
    if (o.threads) {
        c.threads = *o.threads;
    }
    for (const auto& kv : o.reference_overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw UsageError("--reference-hv expects material=value, got '" + kv + "'");
        }
        double v = 0.0;
        const std::string text = kv.substr(eq + 1);
        const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
        if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
            throw UsageError("--reference-hv: bad value in '" + kv + "'");
        }
        c.reference_hypervolumes[canonical_material_name(kv.substr(0, eq))] = v;
    }
    try {
        c.algorithm.validate();
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    return c;
}

TaskSpec task_for(const ExperimentConfig& c, const std::string& name)
{
    try {
        return c.task(name);
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
}

// Fails before any compute if the file cannot be written.
void probe_writable(const std::filesystem::path& path)
{
    const bool existed = std::filesystem::exists(path);
    {
        std::ofstream f(path, std::ios::app);
        if (!f) {
            throw IoError("cannot write '" + path.string() + "'");
        }
    }
    if (!existed) {
        std::filesystem::remove(path);
    }
}

void print_trace(std::ostream& os, const std::vector<TracePoint>& trace, const std::vector<std::string>& goals)
{
    os << "generation,evaluations,goal,current_hypervolume,best_hypervolume\n";
    for (std::size_t g = 0; g < trace.size(); ++g) {
        const auto& t = trace[g];
        os << g << ',' << t.evaluations << ',' << goals.at(t.goal) << ',' << num(t.current_hypervolume) << ','
           << num(t.best_hypervolume) << "\n";
    }
}

int cmd_simulate(const Options& o, std::ostream& out)
{
    const ExperimentConfig c = load_config(o);
    const TaskSpec task = task_for(c, o.material);
    ProcessParams p;
    p.cutting_speed = o.speed;
    p.cutting_angle = o.rake;
    p.cutting_depth = o.depth;
    try {
        p.validate();
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    const CutState s = solve_cut_state(task.material, p, task.total_depth);
    const EvalResult r = evaluate(task, p);
    out << "material: " << task.material.name << "\n"
        << "cutting_speed: " << num(p.cutting_speed) << "\n"
        << "cutting_angle: " << num(p.cutting_angle) << "\n"
        << "cutting_depth: " << num(p.cutting_depth) << "\n"
        << "shear_angle: " << num(s.shear_angle) << "\n"
        << "strain_rate_ratio: " << num(s.strain_rate_ratio) << "\n"
        << "zone_ratio: " << num(s.zone_ratio) << "\n"
        << "shear_plane_temperature: " << num(s.T_AB) << "\n"
        << "interface_temperature: " << num(s.T_int) << "\n"
        << "cutting_force: " << num(s.outputs.Fc) << "\n"
        << "thrust_force: " << num(s.outputs.Ft) << "\n"
        << "chip_thickness: " << num(s.outputs.t_c) << "\n"
        << "layers: " << s.outputs.n_layers << "\n"
        << "feasible: " << (r.feasible ? "true" : "false") << "\n"
        << "violation: " << num(r.violation) << "\n";
    if (r.objectives) {
        out << "production_time: " << num(r.objectives->production_time) << "\n"
            << "tool_wear: " << num(r.objectives->tool_wear) << "\n";
    }
    return kExitOk;
}

int cmd_sample(const Options& o, std::ostream& out)
{
    const ExperimentConfig c = load_config(o);
    const TaskSpec task = task_for(c, o.material);
    if (o.samples < 1) {
        throw UsageError("--samples must be >= 1");
    }
    if (!o.out.empty()) {
        probe_writable(o.out);
    }
    Rng rng(o.seed.value_or(0));
    std::vector<Phenotype> xs;
    std::vector<ObjectiveVector> objs;
    for (std::size_t i = 0; i < o.samples; ++i) {
        const Phenotype x = random_phenotype(task.bounds, rng);
        const EvalResult r = evaluate(task, x);
        if (r.feasible) {
            xs.push_back(x);
            objs.push_back(*r.objectives);
        }
    }
    std::vector<Point> raw;
    for (const auto& v : objs) {
        const auto a = v.values();
        raw.emplace_back(a.begin(), a.end());
    }
    std::vector<std::size_t> front;
    if (!raw.empty()) {
        front = non_dominated_sort(raw).front();
    }
    std::vector<Point> norm;
    for (std::size_t i : front) {
        const auto a = normalize(objs[i]);
        norm.emplace_back(a.begin(), a.end());
    }
    std::ostringstream csv;
    csv << "cutting_speed,cutting_angle,cutting_depth,production_time,tool_wear,cutting_force,thrust_force\n";
    for (std::size_t i : front) {
        csv << num(xs[i][0]) << ',' << num(xs[i][1]) << ',' << num(xs[i][2]) << ','
            << num(objs[i].production_time) << ',' << num(objs[i].tool_wear) << ',' << num(objs[i].abs_Fc) << ','
            << num(objs[i].abs_Ft) << "\n";
    }
    out << "material: " << task.material.name << "\n"
        << "samples: " << o.samples << "\n"
        << "feasible: " << xs.size() << "\n"
        << "front_size: " << front.size() << "\n"
        << "hypervolume: " << num(hypervolume(norm)) << "\n";
    if (o.out.empty()) {
        out << "\n" << csv.str();
    } else {
        write_text_file(o.out, csv.str());
    }
    return kExitOk;
}

int cmd_optimize(const Options& o, std::ostream& out)
{
    if (o.out.empty()) {
        throw UsageError("optimize needs --out <archive.json>");
    }
    Options opt = o;
    if (opt.materials.empty() && !opt.material.empty()) {
        opt.materials = {opt.material};
    }
    if (opt.materials.empty()) {
        throw UsageError("optimize needs --material or --materials");
    }
    const ExperimentConfig c = load_config(opt);
    std::vector<TaskSpec> tasks;
    for (const auto& m : c.materials) {
        tasks.push_back(task_for(c, m));
    }
    AlgoConfig algo = c.algorithm;
    algo.seed = opt.seed.value_or(0);
    probe_writable(o.out);

    ParetoArchive archive;
    if (o.algo == "baseline") {
        if (tasks.size() != 1) {
            throw UsageError("--algo baseline optimises a single material");
        }
        const RunResult r = run(tasks[0], algo);
        print_trace(out, r.trace, c.materials);
        archive = r.best_front;
    } else if (o.algo == "vg" || o.algo == "vg-ai") {
        if (tasks.size() < 2) {
            throw UsageError("--algo " + o.algo + " needs --materials with at least two materials");
        }
        Representation rep;
        if (o.algo == "vg-ai") {
            rep = {GenotypeKind::active_inactive, c.gene_length};
        }
        try {
            rep.validate();
        } catch (const DomainError& e) {
            throw UsageError(e.what());
        }
        const VaryingGoalsResult r = varying_goals_run(GoalSchedule{tasks, c.epoch_length}, algo, rep);
        print_trace(out, r.trace, c.materials);
        archive = r.stored;
    } else {
        throw UsageError("unknown --algo '" + o.algo + "' (baseline, vg, vg-ai)");
    }
    if (archive.individuals.empty()) {
        throw ModelDomainError("no feasible solution was found; nothing to store");
    }
    save_archive(archive, o.out);
    return kExitOk;
}

std::optional<double> reference_from_csv(const std::string& path, const std::string& material, std::size_t pop,
                                         std::size_t gens)
{
    std::istringstream in(read_text_file(path));
    std::string line;
    std::getline(in, line);
    if (line.rfind("material,population_size,max_generations,runs,mean", 0) != 0) {
        throw SchemaError("'" + path + "' is not a reference_hypervolumes.csv table");
    }
    std::optional<double> any;
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            f.push_back(cell);
        }
        if (f.size() < 5 || f[0] != material) {
            continue;
        }
        try {
            const double mean = std::stod(f[4]);
            if (std::stoull(f[1]) == pop && std::stoull(f[2]) == gens) {
                return mean;
            }
            any = mean;
        } catch (const std::exception&) {
            throw SchemaError("'" + path + "': bad row '" + line + "'");
        }
    }
    return any;
}

int cmd_adapt(const Options& o, std::ostream& out)
{
    if (o.archive.empty()) {
        throw UsageError("adapt needs an archive path");
    }
    if (o.material.empty()) {
        throw UsageError("adapt needs --material <target>");
    }
    const ExperimentConfig c = load_config(o);
    const TaskSpec task = task_for(c, o.material);
    const ParetoArchive source = load_archive(o.archive);
    const std::string target = task.material.name;

    std::optional<double> ref = o.reference;
    if (!ref) {
        const auto it = c.reference_hypervolumes.find(target);
        if (it != c.reference_hypervolumes.end()) {
            ref = it->second;
        }
    }
    if (!ref && !o.references_path.empty()) {
        ref = reference_from_csv(o.references_path, target, c.algorithm.population_size,
                                 c.algorithm.max_generations);
    }
    if (!ref) {
        throw UsageError("no reference hypervolume for '" + target +
                         "': run the from-scratch campaign first (experiment --scratch-only) and pass "
                         "--references <dir>/reference_hypervolumes.csv, or give --reference <hv>");
    }
    if (!(*ref > 0.0 && *ref <= 1.0)) {
        throw UsageError("reference hypervolume must lie in (0, 1]");
    }
    const std::size_t runs = o.runs.value_or(1);
    if (runs < 1) {
        throw UsageError("--runs must be >= 1");
    }
    if (!o.out.empty()) {
        probe_writable(o.out);
    }
    const double thr = c.threshold * *ref;
    const std::uint64_t base = o.seed.value_or(0);

    std::vector<std::optional<std::uint64_t>> checkpoints;
    std::ostringstream table;
    std::ostringstream traces;
    table << "run,seed,best_hypervolume,evaluations_used,success_checkpoint\n";
    traces << "run,generation,evaluations,current_hypervolume,best_hypervolume\n";
    for (std::size_t r = 0; r < runs; ++r) {
        AlgoConfig algo = c.algorithm;
        algo.seed = run_seed(base, 0, r);
        const RunResult res = run(task, algo, &source, thr, source.representation);
        checkpoints.push_back(res.success_checkpoint);
        table << r << ',' << algo.seed << ',' << num(res.best_hypervolume) << ',' << res.evaluations_used << ','
              << (res.success_checkpoint ? std::to_string(*res.success_checkpoint) : "") << "\n";
        for (std::size_t g = 0; g < res.trace.size(); ++g) {
            const auto& t = res.trace[g];
            traces << r << ',' << g << ',' << t.evaluations << ',' << num(t.current_hypervolume) << ','
                   << num(t.best_hypervolume) << "\n";
        }
    }
    const auto ce = computational_effort(checkpoints, c.algorithm.population_size);
    std::size_t successes = 0;
    for (const auto& cp : checkpoints) {
        successes += cp.has_value();
    }
    out << "source: " << (source.tasks.size() == 1 ? source.tasks[0] : source.tasks[0] + "+" + source.tasks[1])
        << "\n"
        << "target: " << target << "\n"
        << "reference_hypervolume: " << num(*ref) << "\n"
        << "threshold: " << num(thr) << "\n"
        << "successes: " << successes << "/" << runs << "\n"
        << "ce: " << (ce ? std::to_string(*ce) : "none") << "\n\n"
        << table.str();
    if (!o.out.empty()) {
        write_text_file(o.out, traces.str());
    }
    return kExitOk;
}

int cmd_experiment(const Options& o, std::ostream& out, std::ostream& err)
{
    const ExperimentConfig c = load_config(o);
    try {
        c.validate();
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    CampaignOptions opt;
    opt.scratch_only = o.scratch_only;
    opt.baseline_only = o.baseline_only;
    opt.progress = [&err](const std::string& msg) { err << msg << std::endl; };
    run_experiment(c, opt);
    out << read_text_file(std::filesystem::path(c.output_dir) / "aggregates.csv");
    return kExitOk;
}

int cmd_hv(const Options& o, std::ostream& out)
{
    if (o.archive.empty()) {
        throw UsageError("hv needs an archive path");
    }
    const ParetoArchive a = load_archive(o.archive);
    std::vector<Point> pts;
    for (const auto& e : a.individuals) {
        const auto v = normalize(e.objectives);
        pts.emplace_back(v.begin(), v.end());
    }
    out << "points: " << pts.size() << "\n"
        << "hypervolume: " << num(hypervolume(pts)) << "\n"
        << "stored_best_hypervolume: " << num(a.best_hypervolume) << "\n";
    return kExitOk;
}

int cmd_report(const Options& o, std::ostream& out)
{
    const std::string dir = !o.dir.empty() ? o.dir : o.out;
    if (dir.empty()) {
        throw UsageError("report needs a bundle directory");
    }
    render_report(dir);
    out << read_text_file(std::filesystem::path(dir) / "reference_hypervolumes.csv") << "\n"
        << read_text_file(std::filesystem::path(dir) / "aggregates.csv");
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Flexibility benchmark for multi-objective machining optimisation"};
    app.require_subcommand(1);
    Options o;

    auto common = [&o](CLI::App* s) {
        s->add_option("--config", o.config_path, "Experiment config JSON");
        s->add_option("--seed", o.seed, "Seed");
    };
    auto algo_flags = [&o](CLI::App* s) {
        s->add_option("--pop", o.pop, "Population size");
        s->add_option("--gens", o.gens, "Generations");
        s->add_option("--epoch", o.epoch, "Epoch length for varying goals");
        s->add_option("--gene-length", o.gene_length, "Slots per active-inactive gene");
    };

    auto* sim = app.add_subcommand("simulate", "Evaluate the cutting model once");
    common(sim);
    sim->add_option("--material", o.material)->required();
    sim->add_option("--speed", o.speed, "Cutting speed [m/s]");
    sim->add_option("--rake", o.rake, "Rake angle [rad]");
    sim->add_option("--depth", o.depth, "Cutting depth");

    auto* sample = app.add_subcommand("sample", "Approximate a front by uniform random sampling");
    common(sample);
    sample->add_option("--material", o.material)->required();
    sample->add_option("-n,--samples", o.samples, "Number of samples");
    sample->add_option("--out", o.out, "Write the front as CSV here");

    auto* optimize = app.add_subcommand("optimize", "Optimise from scratch and store the front");
    common(optimize);
    algo_flags(optimize);
    optimize->add_option("--material", o.material);
    optimize->add_option("--materials", o.materials, "Goals for varying-goals training")->delimiter(',');
    optimize->add_option("--algo", o.algo, "baseline | vg | vg-ai");
    optimize->add_option("--out", o.out, "Archive path")->required();

    auto* adapt = app.add_subcommand("adapt", "Adapt a stored front to a target material");
    common(adapt);
    algo_flags(adapt);
    adapt->add_option("archive", o.archive, "Archive to seed from")->required();
    adapt->add_option("--material", o.material, "Target material")->required();
    adapt->add_option("--threshold", o.threshold, "Fraction of the reference hypervolume");
    adapt->add_option("--reference", o.reference, "Reference hypervolume of the target");
    adapt->add_option("--references", o.references_path, "reference_hypervolumes.csv of a campaign");
    adapt->add_option("--runs", o.runs, "Independent runs");
    adapt->add_option("--out", o.out, "Write the per-generation traces as CSV here");

    auto* exp = app.add_subcommand("experiment", "Run the full campaign and write the report bundle");
    common(exp);
    algo_flags(exp);
    exp->add_option("--materials", o.materials)->delimiter(',');
    exp->add_option("--runs", o.runs);
    exp->add_option("--threshold", o.threshold);
    exp->add_option("--out", o.out, "Output directory");
    exp->add_option("--threads", o.threads, "Worker threads (0: all cores)");
    exp->add_option("--reference-hv", o.reference_overrides, "material=value reference override");
    exp->add_flag("--scratch-only", o.scratch_only);
    exp->add_flag("--baseline-only", o.baseline_only);

    auto* hv = app.add_subcommand("hv", "Hypervolume of a stored front");
    hv->add_option("archive", o.archive)->required();

    auto* report = app.add_subcommand("report", "Re-render the tables of a bundle from runs.csv");
    report->add_option("dir", o.dir, "Bundle directory");
    report->add_option("--out", o.out, "Bundle directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (sim->parsed()) {
            return cmd_simulate(o, out);
        }
        if (sample->parsed()) {
            return cmd_sample(o, out);
        }
        if (optimize->parsed()) {
            return cmd_optimize(o, out);
        }
        if (adapt->parsed()) {
            return cmd_adapt(o, out);
        }
        if (exp->parsed()) {
            return cmd_experiment(o, out, err);
        }
        if (hv->parsed()) {
            return cmd_hv(o, out);
        }
        if (report->parsed()) {
            return cmd_report(o, out);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const SchemaError& e) {
        err << "schema error: " << e.what() << "\n";
        return kExitIo;
    } catch (const StructureError& e) {
        err << "schema error: " << e.what() << "\n";
        return kExitIo;
    } catch (const nlohmann::json::exception& e) {
        err << "schema error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ConvergenceError& e) {
        err << "convergence error: " << e.what() << "\n";
        return kExitModel;
    } catch (const ModelDomainError& e) {
        err << "model domain error: " << e.what() << "\n";
        return kExitModel;
    }
    return kExitUsage;
}

} // namespace flexbench
