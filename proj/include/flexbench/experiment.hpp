#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flexbench/algo_config.hpp"
#include "flexbench/material.hpp"
#include "flexbench/metrics.hpp"
#include "flexbench/task.hpp"

namespace flexbench {

struct SweepAxes {
    std::vector<std::size_t> epoch_lengths;
    std::vector<std::size_t> gene_lengths;
    std::vector<std::string> sweep_pair{"steel", "tungsten-alloy"};
    std::string sweep_target = "inconel-718";
    // Paired element-wise; an empty generation list reuses max_generations.
    std::vector<std::size_t> population_sizes;
    std::vector<std::size_t> generation_counts;
};

struct ExperimentConfig {
    std::vector<std::string> materials{"steel", "tungsten-alloy", "steel-dummy", "inconel-718"};
    std::vector<MaterialParams> catalog; // extra materials, looked up before the built-ins
    double total_length = 1.0;
    double total_depth = 1.0;
    AlgoConfig algorithm;
    std::size_t epoch_length = 5;
    std::size_t gene_length = 2;
    std::size_t runs = 100;
    double threshold = 0.99;
    std::uint64_t base_seed = 1;
    std::map<std::string, double> reference_hypervolumes; // overrides for adaption targets
    SweepAxes sweeps;
    std::string output_dir = "results";
    std::size_t threads = 0; // 0: hardware concurrency

    void validate() const; // throws DomainError
    TaskSpec task(const std::string& material) const;
};

// Missing keys keep their defaults. Throws SchemaError.
ExperimentConfig experiment_config_from_json(std::string_view text);
std::string experiment_config_to_json(const ExperimentConfig& c);
// Extra materials from a catalog file ({"materials": [...]} or a bare list).
std::vector<MaterialParams> load_material_catalog(const std::filesystem::path& path);

// One optimisation run of a campaign; the row format of runs.csv.
struct RunRecord {
    std::string phase;     // scratch | train | adapt
    std::string algorithm; // baseline | varying-goals | varying-goals+active-inactive
    std::size_t population_size = 0;
    std::size_t max_generations = 0;
    std::size_t epoch_length = 0;
    std::size_t gene_length = 0;
    std::string source; // empty for scratch; "a+b" for a trained pair
    std::string target; // material, or the pair for training runs
    std::size_t run = 0;
    std::uint64_t seed = 0;
    double best_hypervolume = 0.0;
    std::uint64_t evaluations_used = 0;
    std::optional<std::uint64_t> success_checkpoint;
    double threshold = 0.0;

    bool operator==(const RunRecord&) const = default;
};

struct CampaignOptions {
    bool scratch_only = false;
    bool baseline_only = false;       // skip the varying-goals blocks
    std::uint64_t cell_offset = 0;    // keeps seeds of sub-campaigns apart
    std::function<void(const std::string&)> progress;
};

struct CampaignResult {
    std::vector<std::string> materials;
    std::vector<RunRecord> runs;
    std::map<std::string, double> reference_mean; // from-scratch mean best HV
    std::map<std::string, double> reference_used; // adaption references after overrides
};

CampaignResult run_campaign(const ExperimentConfig& config, const CampaignOptions& options = {});

// Sweeps of epoch/gene length (pair -> target) under the given config.
std::vector<RunRecord> run_epoch_gene_sweep(const ExperimentConfig& config,
                                            const std::map<std::string, double>& references,
                                            const CampaignOptions& options = {});

struct CeRow {
    std::string phase;
    std::string algorithm;
    std::size_t population_size = 0;
    std::size_t max_generations = 0;
    std::size_t epoch_length = 0;
    std::size_t gene_length = 0;
    std::string source;
    std::string target;
    std::size_t runs = 0;
    std::size_t successes = 0;
    std::optional<std::uint64_t> ce;
};

// Computational effort per (phase, algorithm, setting, source, target) cell.
std::vector<CeRow> ce_table(const std::vector<RunRecord>& runs, double z = 0.99);

struct AggregateRow {
    std::string phase;
    std::string algorithm;
    std::size_t population_size = 0;
    std::size_t max_generations = 0;
    std::size_t epoch_length = 0;
    std::size_t gene_length = 0;
    std::size_t cells = 0;
    std::size_t defined = 0;
    std::optional<Aggregates> costs;
};

std::vector<AggregateRow> aggregate_table(const std::vector<CeRow>& ce);

struct ReferenceRow {
    std::string material;
    std::size_t population_size = 0;
    std::size_t max_generations = 0;
    std::size_t runs = 0;
    double mean = 0.0;
    double stddev = 0.0;
    double min = 0.0;
    double max = 0.0;
};

std::vector<ReferenceRow> reference_table(const std::vector<RunRecord>& runs);

void write_runs_csv(const std::filesystem::path& path, const std::vector<RunRecord>& runs);
std::vector<RunRecord> read_runs_csv(const std::filesystem::path& path);

// runs.csv plus every derived table, into `dir`.
void write_bundle(const std::filesystem::path& dir, const std::vector<RunRecord>& runs);
// Re-derives the tables from dir/runs.csv.
void render_report(const std::filesystem::path& dir);

// Full experiment including configured sweeps, written below config.output_dir.
void run_experiment(const ExperimentConfig& config, const CampaignOptions& options = {});

} // namespace flexbench
