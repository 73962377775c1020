#include "flexbench/json_io.hpp"

#include <fstream>
#include <sstream>

#include "flexbench/errors.hpp"

namespace flexbench {

using ordered_json = nlohmann::ordered_json;

ordered_json algo_config_to_json(const AlgoConfig& c)
{
    ordered_json j;
    j["population_size"] = c.population_size;
    j["max_generations"] = c.max_generations;
    j["tournament_size"] = c.tournament_size;
    j["eta_cross"] = c.eta_cross;
    j["eta_mut"] = c.eta_mut;
    j["mutation_prob"] = c.mutation_prob;
    j["crossover_prob"] = c.crossover_prob;
    j["seed"] = c.seed;
    return j;
}

AlgoConfig algo_config_from_json(const ordered_json& j, AlgoConfig c)
{
    try {
        if (!j.is_object()) {
            throw SchemaError("algorithm config must be an object");
        }
        c.population_size = j.value("population_size", c.population_size);
        c.max_generations = j.value("max_generations", c.max_generations);
        c.tournament_size = j.value("tournament_size", c.tournament_size);
        c.eta_cross = j.value("eta_cross", c.eta_cross);
        c.eta_mut = j.value("eta_mut", c.eta_mut);
        c.mutation_prob = j.value("mutation_prob", c.mutation_prob);
        c.crossover_prob = j.value("crossover_prob", c.crossover_prob);
        c.seed = j.value("seed", c.seed);
        c.validate();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("algorithm config: ") + e.what());
    } catch (const DomainError& e) {
        throw SchemaError(std::string("algorithm config: ") + e.what());
    }
    return c;
}

ordered_json material_to_json(const MaterialParams& m)
{
    ordered_json j;
    j["name"] = m.name;
    j["T0"] = m.T0;
    j["Tw"] = m.Tw;
    j["rho"] = m.rho;
    j["eta"] = m.eta;
    j["psi"] = m.psi;
    j["jc_A"] = m.jc_A;
    j["jc_B"] = m.jc_B;
    j["jc_n"] = m.jc_n;
    j["jc_C"] = m.jc_C;
    j["jc_m"] = m.jc_m;
    j["Tm"] = m.Tm;
    j["jc_eps0"] = m.jc_eps0;
    return j;
}

MaterialParams material_from_json(const ordered_json& j)
{
    MaterialParams m;
    try {
        m.name = j.at("name").get<std::string>();
        m.T0 = j.value("T0", m.T0);
        m.Tw = j.value("Tw", m.Tw);
        m.rho = j.at("rho").get<double>();
        m.eta = j.value("eta", m.eta);
        m.psi = j.value("psi", m.psi);
        m.jc_A = j.at("jc_A").get<double>();
        m.jc_B = j.at("jc_B").get<double>();
        m.jc_n = j.at("jc_n").get<double>();
        m.jc_C = j.at("jc_C").get<double>();
        m.jc_m = j.at("jc_m").get<double>();
        m.Tm = j.at("Tm").get<double>();
        m.jc_eps0 = j.value("jc_eps0", m.jc_eps0);
        m.validate();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("material: ") + e.what());
    } catch (const DomainError& e) {
        throw SchemaError(std::string("material: ") + e.what());
    }
    return m;
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        throw IoError("error reading '" + path.string() + "'");
    }
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out << text;
    out.flush();
    if (!out) {
        throw IoError("error writing '" + path.string() + "'");
    }
}

} // namespace flexbench
