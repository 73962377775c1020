#include "flexbench/archive.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "flexbench/errors.hpp"
#include "flexbench/json_io.hpp"

namespace flexbench {

using ordered_json = nlohmann::ordered_json;

namespace {

void check_archive(const ParetoArchive& a)
{
    if (a.format_version != ParetoArchive::kFormatVersion) {
        throw SchemaError("archive: unsupported format_version " + std::to_string(a.format_version));
    }
    if (a.tasks.empty()) {
        throw SchemaError("archive: no task identifiers");
    }
    if (a.individuals.empty()) {
        throw SchemaError("archive: no individuals");
    }
    try {
        a.representation.validate();
        a.config.validate();
    } catch (const DomainError& e) {
        throw SchemaError(std::string("archive: ") + e.what());
    }
    const Bounds b = default_bounds();
    for (const auto& ind : a.individuals) {
        if (ind.genotype.size() != a.representation.genotype_size()) {
            throw SchemaError("archive: genotype length does not match the representation");
        }
        for (std::size_t i = 0; i < kNumProcess; ++i) {
            if (!(ind.phenotype[i] >= b[i].lo && ind.phenotype[i] <= b[i].hi)) {
                throw SchemaError("archive: phenotype outside the process bounds");
            }
        }
    }
}

} // namespace

std::string archive_to_json(const ParetoArchive& a)
{
    check_archive(a);
    ordered_json j;
    j["format_version"] = a.format_version;
    j["tasks"] = a.tasks;
    j["algorithm"] = a.algorithm;
    j["genotype_kind"] = std::string(to_string(a.representation.kind));
    j["gene_length"] = a.representation.gene_length;
    j["epoch_length"] = a.epoch_length;
    j["config"] = algo_config_to_json(a.config);
    j["seed"] = a.seed;
    j["best_hypervolume"] = a.best_hypervolume;
    j["generation"] = a.generation;
    j["evaluations"] = a.evaluations;
    ordered_json inds = ordered_json::array();
    for (const auto& ind : a.individuals) {
        ordered_json e;
        e["genotype"] = ind.genotype;
        e["phenotype"] = ind.phenotype;
        e["objectives"] = ordered_json::array(
            {ind.objectives.production_time, ind.objectives.tool_wear, ind.objectives.abs_Fc, ind.objectives.abs_Ft});
        inds.push_back(std::move(e));
    }
    j["individuals"] = std::move(inds);
    return j.dump(2) + "\n";
}

ParetoArchive archive_from_json(std::string_view text)
{
    ParetoArchive a;
    try {
        const ordered_json j = ordered_json::parse(text);
        a.format_version = j.at("format_version").get<int>();
        if (a.format_version != ParetoArchive::kFormatVersion) {
            throw SchemaError("archive: unsupported format_version " + std::to_string(a.format_version));
        }
        a.tasks = j.at("tasks").get<std::vector<std::string>>();
        a.algorithm = j.at("algorithm").get<std::string>();
        a.representation.kind = genotype_kind_from_string(j.at("genotype_kind").get<std::string>());
        a.representation.gene_length = j.at("gene_length").get<std::size_t>();
        a.epoch_length = j.at("epoch_length").get<std::size_t>();
        a.config = algo_config_from_json(j.at("config"));
        a.seed = j.at("seed").get<std::uint64_t>();
        a.best_hypervolume = j.at("best_hypervolume").get<double>();
        a.generation = j.at("generation").get<std::size_t>();
        a.evaluations = j.at("evaluations").get<std::uint64_t>();
        for (const auto& e : j.at("individuals")) {
            ArchiveEntry ind;
            ind.genotype = e.at("genotype").get<std::vector<double>>();
            ind.phenotype = e.at("phenotype").get<Phenotype>();
            const auto obj = e.at("objectives").get<std::array<double, kNumObjectives>>();
            ind.objectives = ObjectiveVector{obj[0], obj[1], obj[2], obj[3]};
            a.individuals.push_back(std::move(ind));
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("archive: ") + e.what());
    } catch (const DomainError& e) {
        throw SchemaError(std::string("archive: ") + e.what());
    }
    check_archive(a);
    return a;
}

void save_archive(const ParetoArchive& a, const std::filesystem::path& path)
{
    const std::string text = archive_to_json(a);
    write_text_file(path, text);
}

ParetoArchive load_archive(const std::filesystem::path& path)
{
    return archive_from_json(read_text_file(path));
}

} // namespace flexbench
