#include "flexbench/genotype.hpp"

#include <string>

namespace flexbench {

std::size_t goal_index(std::size_t i, std::size_t epoch_length, std::size_t n_goals)
{
    if (i < 1 || epoch_length < 1 || n_goals < 1) {
        throw DomainError("goal_index: requires i >= 1, E >= 1, n >= 1");
    }
    return ((i - 1) / epoch_length) % n_goals;
}

AIGenotype::AIGenotype(std::size_t l, std::vector<double> values) : gene_length(l), flat(std::move(values)) {}

std::size_t AIGenotype::selector(std::size_t gene) const
{
    const double s = flat[gene * (gene_length + 1)];
    if (!(s >= 1.0 && s <= static_cast<double>(gene_length)) || s != std::floor(s)) {
        throw StructureError("active-inactive genotype: selector " + std::to_string(s) + " of gene " +
                             std::to_string(gene) + " outside [1, " + std::to_string(gene_length) + "]");
    }
    return static_cast<std::size_t>(s);
}

void AIGenotype::set_selector(std::size_t gene, std::size_t sel)
{
    if (sel < 1 || sel > gene_length) {
        throw StructureError("active-inactive genotype: selector out of range");
    }
    flat[gene * (gene_length + 1)] = static_cast<double>(sel);
}

void AIGenotype::check() const
{
    if (gene_length < 1) {
        throw StructureError("active-inactive genotype: gene length must be >= 1");
    }
    if (flat.size() != kNumProcess * (gene_length + 1)) {
        throw StructureError("active-inactive genotype: expected " + std::to_string(kNumProcess * (gene_length + 1)) +
                             " values, got " + std::to_string(flat.size()));
    }
    for (std::size_t i = 0; i < kNumProcess; ++i) {
        (void)selector(i);
    }
}

Phenotype decode(const AIGenotype& g)
{
    g.check();
    Phenotype p{};
    for (std::size_t i = 0; i < kNumProcess; ++i) {
        p[i] = g.slot(i, g.selector(i));
    }
    return p;
}

AIGenotype encode(const AIGenotype& g, std::span<const double> p)
{
    g.check();
    if (p.size() != kNumProcess) {
        throw StructureError("encode: phenotype has " + std::to_string(p.size()) + " values, expected " +
                             std::to_string(kNumProcess));
    }
    AIGenotype out = g;
    for (std::size_t i = 0; i < kNumProcess; ++i) {
        out.slot(i, g.selector(i)) = p[i];
    }
    return out;
}

} // namespace flexbench
