#include "flexbench/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

#include "flexbench/archive.hpp"
#include "flexbench/errors.hpp"
#include "flexbench/json_io.hpp"
#include "flexbench/nsga2.hpp"
#include "flexbench/variants.hpp"

namespace flexbench {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string pair_name(const std::string& a, const std::string& b)
{
    return a + "+" + b;
}

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s)
{
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw SchemaError("runs.csv: bad number '" + s + "'");
    }
    return v;
}

std::uint64_t parse_uint(const std::string& s)
{
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw SchemaError("runs.csv: bad integer '" + s + "'");
    }
    return v;
}

// Runs fn(i) for i in [0, n) on a small thread pool. The first exception is rethrown.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn)
{
    if (threads == 0) {
        threads = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    }
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) {
                return;
            }
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(n);
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

// First checkpoint at which the run reached `fraction` of its own best.
std::optional<std::uint64_t> own_checkpoint(const RunResult& r, double fraction)
{
    if (!(r.best_hypervolume > 0.0)) {
        return std::nullopt;
    }
    const double target = fraction * r.best_hypervolume;
    for (const auto& t : r.trace) {
        if (t.best_hypervolume >= target) {
            return t.evaluations;
        }
    }
    return std::nullopt;
}

struct TrainJob {
    std::size_t a = 0;
    std::size_t b = 0;
    Representation rep;
    std::size_t epoch = 0;
    std::uint64_t cell = 0;
};

struct AdaptJob {
    std::string algorithm;
    std::string source;
    std::size_t target = 0;
    Representation rep;
    std::size_t epoch = 0;
    std::uint64_t cell = 0;
    std::vector<const ParetoArchive*> seeds; // per run, may be null
};

class Campaign {
public:
    Campaign(const ExperimentConfig& cfg, const CampaignOptions& opt) : cfg_(cfg), opt_(opt)
    {
        cfg_.validate();
        for (const auto& m : cfg_.materials) {
            tasks_.push_back(cfg_.task(m));
        }
        cell_ = opt_.cell_offset;
    }

    void say(const std::string& msg) const
    {
        if (opt_.progress) {
            opt_.progress(msg);
        }
    }

    AlgoConfig algo_for(std::uint64_t cell, std::size_t run) const
    {
        AlgoConfig c = cfg_.algorithm;
        c.seed = run_seed(cfg_.base_seed, cell, run);
        return c;
    }

    std::vector<TrainJob> training_jobs(const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                        const std::vector<std::pair<Representation, std::size_t>>& variants)
    {
        std::vector<TrainJob> jobs;
        for (const auto& [rep, epoch] : variants) {
            for (const auto& [a, b] : pairs) {
                jobs.push_back({a, b, rep, epoch, cell_++});
            }
        }
        return jobs;
    }

    std::vector<std::vector<VaryingGoalsResult>> train(const std::vector<TrainJob>& jobs,
                                                       std::vector<RunRecord>& records)
    {
        const std::size_t R = cfg_.runs;
        std::vector<std::vector<VaryingGoalsResult>> out(jobs.size(), std::vector<VaryingGoalsResult>(R));
        say("training " + std::to_string(jobs.size() * R) + " varying-goals runs");
        parallel_for(jobs.size() * R, cfg_.threads, [&](std::size_t k) {
            const auto& job = jobs[k / R];
            const std::size_t r = k % R;
            GoalSchedule sched{{tasks_[job.a], tasks_[job.b]}, job.epoch};
            out[k / R][r] = varying_goals_run(sched, algo_for(job.cell, r), job.rep);
        });
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            const auto& job = jobs[j];
            for (std::size_t r = 0; r < R; ++r) {
                const auto& res = out[j][r];
                RunRecord rec = base_record("train", std::string(algorithm_tag(job.rep, true)), job.rep, job.epoch);
                rec.target = pair_name(cfg_.materials[job.a], cfg_.materials[job.b]);
                rec.run = r;
                rec.seed = run_seed(cfg_.base_seed, job.cell, r);
                rec.best_hypervolume = res.stored.best_hypervolume;
                rec.evaluations_used = res.evaluations_used;
                records.push_back(rec);
            }
        }
        return out;
    }

    void adapt(const std::vector<AdaptJob>& jobs, const std::map<std::string, double>& refs,
               std::vector<RunRecord>& records)
    {
        const std::size_t R = cfg_.runs;
        std::vector<RunResult> out(jobs.size() * R);
        say("adapting " + std::to_string(out.size()) + " runs");
        parallel_for(out.size(), cfg_.threads, [&](std::size_t k) {
            const auto& job = jobs[k / R];
            const std::size_t r = k % R;
            const double thr = cfg_.threshold * refs.at(cfg_.materials[job.target]);
            const ParetoArchive* seed = job.seeds[r];
            if (seed != nullptr && seed->individuals.empty()) {
                seed = nullptr;
            }
            out[k] = run(tasks_[job.target], algo_for(job.cell, r), seed, thr, job.rep);
        });
        for (std::size_t k = 0; k < out.size(); ++k) {
            const auto& job = jobs[k / R];
            const std::size_t r = k % R;
            RunRecord rec = base_record("adapt", job.algorithm, job.rep, job.epoch);
            rec.source = job.source;
            rec.target = cfg_.materials[job.target];
            rec.run = r;
            rec.seed = run_seed(cfg_.base_seed, job.cell, r);
            rec.best_hypervolume = out[k].best_hypervolume;
            rec.evaluations_used = out[k].evaluations_used;
            rec.success_checkpoint = out[k].success_checkpoint;
            rec.threshold = cfg_.threshold * refs.at(rec.target);
            records.push_back(rec);
        }
    }

    AdaptJob adapt_job(std::string algorithm, std::string source, std::size_t target, Representation rep,
                       std::size_t epoch)
    {
        AdaptJob j;
        j.algorithm = std::move(algorithm);
        j.source = std::move(source);
        j.target = target;
        j.rep = rep;
        j.epoch = epoch;
        j.cell = cell_++;
        return j;
    }

    RunRecord base_record(std::string phase, std::string algorithm, const Representation& rep,
                          std::size_t epoch) const
    {
        RunRecord rec;
        rec.phase = std::move(phase);
        rec.algorithm = std::move(algorithm);
        rec.population_size = cfg_.algorithm.population_size;
        rec.max_generations = cfg_.algorithm.max_generations;
        rec.epoch_length = epoch;
        rec.gene_length = rep.gene_length;
        return rec;
    }

    Representation ai_rep(std::size_t l) const { return {GenotypeKind::active_inactive, l}; }

    CampaignResult run_all()
    {
        CampaignResult res;
        res.materials = cfg_.materials;
        const std::size_t N = tasks_.size();
        const std::size_t R = cfg_.runs;

        // From scratch.
        const std::uint64_t scratch_cell = cell_;
        cell_ += N;
        std::vector<RunResult> scratch(N * R);
        say("from scratch: " + std::to_string(N * R) + " runs");
        parallel_for(N * R, cfg_.threads, [&](std::size_t k) {
            scratch[k] = run(tasks_[k / R], algo_for(scratch_cell + k / R, k % R));
        });
        for (std::size_t k = 0; k < N * R; ++k) {
            RunRecord rec = base_record("scratch", "baseline", Representation{}, 0);
            rec.target = cfg_.materials[k / R];
            rec.run = k % R;
            rec.seed = run_seed(cfg_.base_seed, scratch_cell + k / R, k % R);
            rec.best_hypervolume = scratch[k].best_hypervolume;
            rec.evaluations_used = scratch[k].evaluations_used;
            rec.success_checkpoint = own_checkpoint(scratch[k], cfg_.threshold);
            rec.threshold = cfg_.threshold * scratch[k].best_hypervolume;
            res.runs.push_back(rec);
        }
        for (std::size_t i = 0; i < N; ++i) {
            double sum = 0.0;
            for (std::size_t r = 0; r < R; ++r) {
                sum += scratch[i * R + r].best_hypervolume;
            }
            const std::string& m = cfg_.materials[i];
            res.reference_mean[m] = sum / static_cast<double>(R);
            const auto it = cfg_.reference_hypervolumes.find(m);
            res.reference_used[m] = it != cfg_.reference_hypervolumes.end() ? it->second : res.reference_mean[m];
        }
        if (opt_.scratch_only || N < 2) {
            return res;
        }

        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t a = 0; a < N; ++a) {
            for (std::size_t b = a + 1; b < N; ++b) {
                pairs.emplace_back(a, b);
            }
        }
        std::vector<TrainJob> train_jobs;
        std::vector<std::vector<VaryingGoalsResult>> trained;
        if (!opt_.baseline_only) {
            train_jobs = training_jobs(pairs, {{Representation{}, cfg_.epoch_length},
                                               {ai_rep(cfg_.gene_length), cfg_.epoch_length}});
            trained = train(train_jobs, res.runs);
        }

        std::vector<AdaptJob> jobs;
        for (std::size_t t = 0; t < N; ++t) {
            for (std::size_t s = 0; s < N; ++s) {
                if (s == t) {
                    continue;
                }
                AdaptJob j = adapt_job("baseline", cfg_.materials[s], t, Representation{}, 0);
                for (std::size_t r = 0; r < R; ++r) {
                    j.seeds.push_back(&scratch[s * R + r].best_front);
                }
                jobs.push_back(std::move(j));
            }
        }
        for (std::size_t k = 0; k < train_jobs.size(); ++k) {
            const auto& tj = train_jobs[k];
            for (std::size_t t = 0; t < N; ++t) {
                if (t == tj.a || t == tj.b) {
                    continue;
                }
                AdaptJob j = adapt_job(std::string(algorithm_tag(tj.rep, true)),
                                       pair_name(cfg_.materials[tj.a], cfg_.materials[tj.b]), t, tj.rep, tj.epoch);
                for (std::size_t r = 0; r < R; ++r) {
                    j.seeds.push_back(&trained[k][r].stored);
                }
                jobs.push_back(std::move(j));
            }
        }
        adapt(jobs, res.reference_used, res.runs);
        return res;
    }

    std::vector<RunRecord> sweep(const std::map<std::string, double>& refs)
    {
        std::vector<RunRecord> records;
        const auto& sw = cfg_.sweeps;
        auto index_of = [&](const std::string& name) {
            const std::string key = canonical_material_name(name);
            for (std::size_t i = 0; i < cfg_.materials.size(); ++i) {
                if (cfg_.materials[i] == key) {
                    return i;
                }
            }
            throw DomainError("sweep material '" + name + "' is not part of the experiment");
        };
        const std::size_t a = index_of(sw.sweep_pair.at(0));
        const std::size_t b = index_of(sw.sweep_pair.at(1));
        const std::size_t target = index_of(sw.sweep_target);
        if (!refs.count(cfg_.materials[target])) {
            throw DomainError("sweep: no reference hypervolume for the target");
        }
        std::vector<std::size_t> epochs = sw.epoch_lengths;
        std::vector<std::size_t> genes = sw.gene_lengths;
        if (epochs.empty()) {
            epochs.push_back(cfg_.epoch_length);
        }
        if (genes.empty()) {
            genes.push_back(cfg_.gene_length);
        }
        std::vector<std::pair<Representation, std::size_t>> variants;
        for (std::size_t e : epochs) {
            variants.emplace_back(Representation{}, e);
            for (std::size_t l : genes) {
                variants.emplace_back(ai_rep(l), e);
            }
        }
        const auto jobs = training_jobs({{a, b}}, variants);
        const auto trained = train(jobs, records);
        std::vector<AdaptJob> adapt_jobs;
        for (std::size_t k = 0; k < jobs.size(); ++k) {
            AdaptJob j = adapt_job(std::string(algorithm_tag(jobs[k].rep, true)),
                                   pair_name(cfg_.materials[a], cfg_.materials[b]), target, jobs[k].rep,
                                   jobs[k].epoch);
            for (std::size_t r = 0; r < cfg_.runs; ++r) {
                j.seeds.push_back(&trained[k][r].stored);
            }
            adapt_jobs.push_back(std::move(j));
        }
        adapt(adapt_jobs, refs, records);
        return records;
    }

private:
    ExperimentConfig cfg_;
    CampaignOptions opt_;
    std::vector<TaskSpec> tasks_;
    std::uint64_t cell_ = 0;
};

using SettingKey = std::tuple<std::string, std::string, std::size_t, std::size_t, std::size_t, std::size_t>;

SettingKey setting_of(const RunRecord& r)
{
    return {r.phase, r.algorithm, r.population_size, r.max_generations, r.epoch_length, r.gene_length};
}

const char* kRunsHeader = "phase,algorithm,population_size,max_generations,epoch_length,gene_length,source,target,"
                          "run,seed,best_hypervolume,evaluations_used,success_checkpoint,threshold";

std::string opt_to_string(const std::optional<std::uint64_t>& v)
{
    return v ? std::to_string(*v) : std::string();
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string safe_name(const std::string& s)
{
    std::string out;
    for (char c : s) {
        out.push_back(c == '+' ? '_' : c);
    }
    return out;
}

} // namespace

void ExperimentConfig::validate() const
{
    if (materials.empty()) {
        throw DomainError("experiment: no materials");
    }
    std::set<std::string> seen;
    for (const auto& m : materials) {
        if (m.find(',') != std::string::npos || m.find('+') != std::string::npos) {
            throw DomainError("experiment: material names must not contain ',' or '+'");
        }
        if (!seen.insert(m).second) {
            throw DomainError("experiment: material '" + m + "' listed twice");
        }
        (void)find_material(m, catalog);
    }
    algorithm.validate();
    if (runs < 1) {
        throw DomainError("experiment: runs must be >= 1");
    }
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw DomainError("experiment: threshold must lie in (0, 1]");
    }
    if (epoch_length < 1 || gene_length < 1) {
        throw DomainError("experiment: epoch and gene length must be >= 1");
    }
    if (!(total_length > 0.0) || !(total_depth > 0.0)) {
        throw DomainError("experiment: total_length and total_depth must be positive");
    }
    for (const auto& [m, v] : reference_hypervolumes) {
        if (!(v > 0.0 && v <= 1.0)) {
            throw DomainError("experiment: reference hypervolume of '" + m + "' must lie in (0, 1]");
        }
    }
    auto positive = [](const std::vector<std::size_t>& v, const char* what) {
        for (std::size_t x : v) {
            if (x < 1) {
                throw DomainError(std::string("experiment: sweep values of ") + what + " must be positive");
            }
        }
    };
    positive(sweeps.epoch_lengths, "epoch_lengths");
    positive(sweeps.gene_lengths, "gene_lengths");
    positive(sweeps.population_sizes, "population_sizes");
    positive(sweeps.generation_counts, "generation_counts");
    for (std::size_t p : sweeps.population_sizes) {
        if (p < 4 || p % 2 != 0) {
            throw DomainError("experiment: swept population sizes must be even and >= 4");
        }
    }
    if (!sweeps.generation_counts.empty() && sweeps.generation_counts.size() != sweeps.population_sizes.size()) {
        throw DomainError("experiment: generation_counts must pair up with population_sizes");
    }
    if (sweeps.sweep_pair.size() != 2) {
        throw DomainError("experiment: sweep_pair must name two materials");
    }
}

TaskSpec ExperimentConfig::task(const std::string& material) const
{
    TaskSpec t = make_task(find_material(material, catalog));
    t.total_length = total_length;
    t.total_depth = total_depth;
    return t;
}

ExperimentConfig experiment_config_from_json(std::string_view text)
{
    ExperimentConfig c;
    try {
        const ordered_json j = ordered_json::parse(text);
        if (!j.is_object()) {
            throw SchemaError("experiment config must be an object");
        }
        if (j.contains("catalog")) {
            for (const auto& m : j.at("catalog")) {
                c.catalog.push_back(material_from_json(m));
            }
        }
        if (j.contains("materials")) {
            c.materials.clear();
            for (const auto& m : j.at("materials")) {
                c.materials.push_back(canonical_material_name(m.get<std::string>()));
            }
        }
        c.total_length = j.value("total_length", c.total_length);
        c.total_depth = j.value("total_depth", c.total_depth);
        if (j.contains("algorithm")) {
            c.algorithm = algo_config_from_json(j.at("algorithm"), c.algorithm);
        }
        c.epoch_length = j.value("epoch_length", c.epoch_length);
        c.gene_length = j.value("gene_length", c.gene_length);
        c.runs = j.value("runs", c.runs);
        c.threshold = j.value("threshold", c.threshold);
        c.base_seed = j.value("base_seed", c.base_seed);
        c.output_dir = j.value("output_dir", c.output_dir);
        c.threads = j.value("threads", c.threads);
        if (j.contains("reference_hypervolumes")) {
            for (const auto& [k, v] : j.at("reference_hypervolumes").items()) {
                c.reference_hypervolumes[canonical_material_name(k)] = v.get<double>();
            }
        }
        if (j.contains("sweeps")) {
            const auto& s = j.at("sweeps");
            auto& sw = c.sweeps;
            sw.epoch_lengths = s.value("epoch_lengths", sw.epoch_lengths);
            sw.gene_lengths = s.value("gene_lengths", sw.gene_lengths);
            sw.population_sizes = s.value("population_sizes", sw.population_sizes);
            sw.generation_counts = s.value("generation_counts", sw.generation_counts);
            sw.sweep_pair = s.value("sweep_pair", sw.sweep_pair);
            sw.sweep_target = s.value("sweep_target", sw.sweep_target);
            for (auto& m : sw.sweep_pair) {
                m = canonical_material_name(m);
            }
            sw.sweep_target = canonical_material_name(sw.sweep_target);
        }
        c.validate();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("experiment config: ") + e.what());
    } catch (const DomainError& e) {
        throw SchemaError(std::string("experiment config: ") + e.what());
    }
    return c;
}

std::string experiment_config_to_json(const ExperimentConfig& c)
{
    ordered_json j;
    j["materials"] = c.materials;
    ordered_json cat = ordered_json::array();
    for (const auto& m : c.catalog) {
        cat.push_back(material_to_json(m));
    }
    j["catalog"] = cat;
    j["total_length"] = c.total_length;
    j["total_depth"] = c.total_depth;
    j["algorithm"] = algo_config_to_json(c.algorithm);
    j["epoch_length"] = c.epoch_length;
    j["gene_length"] = c.gene_length;
    j["runs"] = c.runs;
    j["threshold"] = c.threshold;
    j["base_seed"] = c.base_seed;
    j["reference_hypervolumes"] = ordered_json::object();
    for (const auto& [k, v] : c.reference_hypervolumes) {
        j["reference_hypervolumes"][k] = v;
    }
    j["sweeps"] = {
        {"epoch_lengths", c.sweeps.epoch_lengths},         {"gene_lengths", c.sweeps.gene_lengths},
        {"sweep_pair", c.sweeps.sweep_pair},               {"sweep_target", c.sweeps.sweep_target},
        {"population_sizes", c.sweeps.population_sizes},   {"generation_counts", c.sweeps.generation_counts},
    };
    j["output_dir"] = c.output_dir;
    j["threads"] = c.threads;
    return j.dump(2) + "\n";
}

std::vector<MaterialParams> load_material_catalog(const std::filesystem::path& path)
{
    std::vector<MaterialParams> out;
    try {
        const ordered_json j = ordered_json::parse(read_text_file(path));
        const ordered_json& list = j.is_object() ? j.at("materials") : j;
        for (const auto& m : list) {
            out.push_back(material_from_json(m));
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("material catalog: " + std::string(e.what()));
    }
    return out;
}

CampaignResult run_campaign(const ExperimentConfig& config, const CampaignOptions& options)
{
    Campaign c(config, options);
    return c.run_all();
}

std::vector<RunRecord> run_epoch_gene_sweep(const ExperimentConfig& config,
                                            const std::map<std::string, double>& references,
                                            const CampaignOptions& options)
{
    Campaign c(config, options);
    return c.sweep(references);
}

std::vector<CeRow> ce_table(const std::vector<RunRecord>& runs, double z)
{
    using CellKey = std::tuple<SettingKey, std::string, std::string>;
    std::vector<CellKey> order;
    std::map<CellKey, std::vector<std::optional<std::uint64_t>>> cells;
    for (const auto& r : runs) {
        if (r.phase == "train") {
            continue;
        }
        CellKey key{setting_of(r), r.source, r.target};
        auto [it, fresh] = cells.try_emplace(key);
        if (fresh) {
            order.push_back(key);
        }
        it->second.push_back(r.success_checkpoint);
    }
    std::vector<CeRow> out;
    for (const auto& key : order) {
        const auto& [setting, source, target] = key;
        const auto& cps = cells.at(key);
        CeRow row;
        std::tie(row.phase, row.algorithm, row.population_size, row.max_generations, row.epoch_length,
                 row.gene_length) = setting;
        row.source = source;
        row.target = target;
        row.runs = cps.size();
        row.successes = static_cast<std::size_t>(std::count_if(cps.begin(), cps.end(), [](auto& c) { return c.has_value(); }));
        row.ce = computational_effort(cps, row.population_size, z);
        out.push_back(row);
    }
    return out;
}

std::vector<AggregateRow> aggregate_table(const std::vector<CeRow>& ce)
{
    std::vector<SettingKey> order;
    std::map<SettingKey, AggregateRow> rows;
    std::map<SettingKey, std::vector<double>> values;
    for (const auto& c : ce) {
        const SettingKey key{c.phase, c.algorithm, c.population_size, c.max_generations, c.epoch_length,
                             c.gene_length};
        auto [it, fresh] = rows.try_emplace(key);
        if (fresh) {
            order.push_back(key);
            it->second = AggregateRow{c.phase, c.algorithm, c.population_size, c.max_generations,
                                      c.epoch_length, c.gene_length, 0, 0, std::nullopt};
        }
        ++it->second.cells;
        if (c.ce) {
            ++it->second.defined;
            values[key].push_back(static_cast<double>(*c.ce));
        }
    }
    std::vector<AggregateRow> out;
    for (const auto& key : order) {
        AggregateRow row = rows.at(key);
        if (row.defined > 0) {
            row.costs = cost_aggregates(values.at(key));
        }
        out.push_back(row);
    }
    return out;
}

std::vector<ReferenceRow> reference_table(const std::vector<RunRecord>& runs)
{
    using Key = std::tuple<std::string, std::size_t, std::size_t>;
    std::vector<Key> order;
    std::map<Key, std::vector<double>> hv;
    for (const auto& r : runs) {
        if (r.phase != "scratch") {
            continue;
        }
        Key key{r.target, r.population_size, r.max_generations};
        auto [it, fresh] = hv.try_emplace(key);
        if (fresh) {
            order.push_back(key);
        }
        it->second.push_back(r.best_hypervolume);
    }
    std::vector<ReferenceRow> out;
    for (const auto& key : order) {
        const auto& v = hv.at(key);
        ReferenceRow row;
        std::tie(row.material, row.population_size, row.max_generations) = key;
        row.runs = v.size();
        double sum = 0.0;
        for (double x : v) {
            sum += x;
        }
        row.mean = sum / static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) {
            ss += (x - row.mean) * (x - row.mean);
        }
        row.stddev = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
        row.min = *std::min_element(v.begin(), v.end());
        row.max = *std::max_element(v.begin(), v.end());
        out.push_back(row);
    }
    return out;
}

void write_runs_csv(const std::filesystem::path& path, const std::vector<RunRecord>& runs)
{
    std::ostringstream os;
    os << kRunsHeader << "\n";
    for (const auto& r : runs) {
        os << r.phase << ',' << r.algorithm << ',' << r.population_size << ',' << r.max_generations << ','
           << r.epoch_length << ',' << r.gene_length << ',' << r.source << ',' << r.target << ',' << r.run << ','
           << r.seed << ',' << format_double(r.best_hypervolume) << ',' << r.evaluations_used << ','
           << opt_to_string(r.success_checkpoint) << ',' << format_double(r.threshold) << "\n";
    }
    write_text_file(path, os.str());
}

std::vector<RunRecord> read_runs_csv(const std::filesystem::path& path)
{
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line) || split_csv(line) != split_csv(kRunsHeader)) {
        throw SchemaError("runs.csv: unexpected header in '" + path.string() + "'");
    }
    std::vector<RunRecord> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const auto f = split_csv(line);
        if (f.size() != 14) {
            throw SchemaError("runs.csv: line " + std::to_string(lineno) + " has " + std::to_string(f.size()) +
                              " fields");
        }
        RunRecord r;
        r.phase = f[0];
        r.algorithm = f[1];
        r.population_size = parse_uint(f[2]);
        r.max_generations = parse_uint(f[3]);
        r.epoch_length = parse_uint(f[4]);
        r.gene_length = parse_uint(f[5]);
        r.source = f[6];
        r.target = f[7];
        r.run = parse_uint(f[8]);
        r.seed = parse_uint(f[9]);
        r.best_hypervolume = parse_double(f[10]);
        r.evaluations_used = parse_uint(f[11]);
        if (!f[12].empty()) {
            r.success_checkpoint = parse_uint(f[12]);
        }
        r.threshold = parse_double(f[13]);
        if (r.population_size == 0) {
            throw SchemaError("runs.csv: line " + std::to_string(lineno) + ": population_size must be positive");
        }
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

void write_tables(const std::filesystem::path& dir, const std::vector<RunRecord>& runs)
{
    const auto refs = reference_table(runs);
    {
        std::ostringstream os;
        os << "material,population_size,max_generations,runs,mean,stddev,min,max\n";
        for (const auto& r : refs) {
            os << r.material << ',' << r.population_size << ',' << r.max_generations << ',' << r.runs << ','
               << format_double(r.mean) << ',' << format_double(r.stddev) << ',' << format_double(r.min) << ','
               << format_double(r.max) << "\n";
        }
        write_text_file(dir / "reference_hypervolumes.csv", os.str());
    }
    const auto ce = ce_table(runs);
    {
        std::ostringstream os;
        os << "phase,algorithm,population_size,max_generations,epoch_length,gene_length,source,target,runs,"
              "successes,ce\n";
        for (const auto& c : ce) {
            os << c.phase << ',' << c.algorithm << ',' << c.population_size << ',' << c.max_generations << ','
               << c.epoch_length << ',' << c.gene_length << ',' << c.source << ',' << c.target << ',' << c.runs
               << ',' << c.successes << ',' << opt_to_string(c.ce) << "\n";
        }
        write_text_file(dir / "ce.csv", os.str());
    }
    const auto agg = aggregate_table(ce);
    {
        std::ostringstream os;
        os << "phase,algorithm,population_size,max_generations,epoch_length,gene_length,cells,defined,worst,"
              "average,best\n";
        for (const auto& a : agg) {
            os << a.phase << ',' << a.algorithm << ',' << a.population_size << ',' << a.max_generations << ','
               << a.epoch_length << ',' << a.gene_length << ',' << a.cells << ',' << a.defined << ',';
            if (a.costs) {
                os << format_double(a.costs->worst) << ',' << format_double(a.costs->average) << ','
                   << format_double(a.costs->best);
            } else {
                os << ",,";
            }
            os << "\n";
        }
        write_text_file(dir / "aggregates.csv", os.str());
    }

    // Target x source matrices, one per adaption algorithm with a single setting.
    std::map<std::string, std::set<SettingKey>> settings;
    for (const auto& r : runs) {
        settings[r.phase + "/" + r.algorithm].insert(setting_of(r));
    }
    std::vector<std::string> targets;
    std::map<std::string, std::string> scratch_ce;
    for (const auto& c : ce) {
        if (c.phase == "scratch") {
            if (std::find(targets.begin(), targets.end(), c.target) == targets.end()) {
                targets.push_back(c.target);
            }
            scratch_ce[c.target] = c.ce ? std::to_string(*c.ce) : "none";
        }
    }
    std::vector<std::string> algorithms;
    for (const auto& c : ce) {
        if (c.phase == "adapt" && std::find(algorithms.begin(), algorithms.end(), c.algorithm) == algorithms.end()) {
            algorithms.push_back(c.algorithm);
        }
    }
    for (const auto& algo : algorithms) {
        if (settings["adapt/" + algo].size() != 1 || settings["scratch/baseline"].size() > 1) {
            continue;
        }
        std::vector<std::string> sources;
        std::map<std::pair<std::string, std::string>, std::string> cell;
        std::vector<std::string> rows = targets;
        for (const auto& c : ce) {
            if (c.phase != "adapt" || c.algorithm != algo) {
                continue;
            }
            if (std::find(sources.begin(), sources.end(), c.source) == sources.end()) {
                sources.push_back(c.source);
            }
            if (std::find(rows.begin(), rows.end(), c.target) == rows.end()) {
                rows.push_back(c.target);
            }
            cell[{c.target, c.source}] = c.ce ? std::to_string(*c.ce) : "none";
        }
        // Single-material sources follow the row order; pairs keep their campaign order.
        std::stable_sort(sources.begin(), sources.end(), [&](const std::string& a, const std::string& b) {
            auto rank = [&](const std::string& s) {
                return static_cast<std::size_t>(std::find(rows.begin(), rows.end(), s) - rows.begin());
            };
            return rank(a) < rank(b);
        });
        std::ostringstream os;
        os << "target,from_scratch";
        for (const auto& s : sources) {
            os << ',' << s;
        }
        os << "\n";
        for (const auto& t : rows) {
            os << t << ',' << (scratch_ce.count(t) ? scratch_ce[t] : "");
            for (const auto& s : sources) {
                const auto it = cell.find({t, s});
                os << ',' << (it != cell.end() ? it->second : "-");
            }
            os << "\n";
        }
        write_text_file(dir / ("ce_matrix_" + safe_name(algo) + ".csv"), os.str());
    }
}

} // namespace

void write_bundle(const std::filesystem::path& dir, const std::vector<RunRecord>& runs)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create '" + dir.string() + "': " + ec.message());
    }
    write_runs_csv(dir / "runs.csv", runs);
    write_tables(dir, runs);
}

void render_report(const std::filesystem::path& dir)
{
    write_tables(dir, read_runs_csv(dir / "runs.csv"));
}

void run_experiment(const ExperimentConfig& config, const CampaignOptions& options)
{
    config.validate();
    const std::filesystem::path out = config.output_dir;
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) {
        throw IoError("cannot create '" + out.string() + "': " + ec.message());
    }
    write_text_file(out / "config.json", experiment_config_to_json(config));

    const CampaignResult main = run_campaign(config, options);
    write_bundle(out, main.runs);

    if (!config.sweeps.epoch_lengths.empty() || !config.sweeps.gene_lengths.empty()) {
        CampaignOptions o = options;
        o.cell_offset = options.cell_offset + 1'000'000;
        write_bundle(out / "sweep_epoch_gene", run_epoch_gene_sweep(config, main.reference_used, o));
    }

    const auto& sw = config.sweeps;
    std::vector<RunRecord> pop_records;
    for (std::size_t k = 0; k < sw.population_sizes.size(); ++k) {
        ExperimentConfig sub = config;
        sub.algorithm.population_size = sw.population_sizes[k];
        if (!sw.generation_counts.empty()) {
            sub.algorithm.max_generations = sw.generation_counts[k];
        }
        // Adaption targets follow the sub-campaign's own from-scratch references.
        sub.reference_hypervolumes.clear();
        CampaignOptions o = options;
        o.cell_offset = options.cell_offset + 2'000'000 + 1'000 * k;
        const CampaignResult r = run_campaign(sub, o);
        pop_records.insert(pop_records.end(), r.runs.begin(), r.runs.end());
    }
    if (!pop_records.empty()) {
        write_bundle(out / "sweep_population", pop_records);
    }
}

} // namespace flexbench
