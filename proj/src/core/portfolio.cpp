#include "cyber/core/portfolio.hpp"

#include <set>

#include "cyber/core/errors.hpp"

namespace cyber {

Portfolio::Portfolio(std::vector<std::string> categories, std::vector<Group> groups)
    : categories_(std::move(categories)), groups_(std::move(groups))
{
    require(!categories_.empty(), "portfolio needs at least one category");
    require(!groups_.empty(), "portfolio needs at least one group");
    std::set<std::string> ids;
    for (const auto& g : groups_) {
        require(ids.insert(g.id).second, "duplicate group id '" + g.id + "'");
        require(g.count >= 1, "non-positive count for group '" + g.id + "'");
        require(g.covariates.size() == groups_.front().covariates.size(),
                "ragged covariate vectors (group '" + g.id + "')");
        total_ += g.count;
    }
}

std::vector<RiskModule> Portfolio::modules() const
{
    std::vector<RiskModule> out;
    out.reserve(module_count());
    for (std::size_t c = 0; c < categories_.size(); ++c)
        for (std::size_t k = 0; k < groups_.size(); ++k) out.push_back({c, k});
    return out;
}

std::size_t Portfolio::module_index(const RiskModule& m) const
{
    require(m.category < categories_.size() && m.group < groups_.size(),
            "risk module index out of bounds");
    return m.category * groups_.size() + m.group;
}

Portfolio build_portfolio(const PortfolioConfig& config)
{
    require(!config.categories.empty(), "C >= 1 required");
    require(!config.groups.empty(), "K >= 1 required");
    std::vector<Group> groups;
    groups.reserve(config.groups.size());
    std::int64_t total = 0;
    for (const auto& g : config.groups) {
        require(g.count > 0, "non-positive count for group '" + g.id + "'");
        groups.push_back({g.id, g.covariates, static_cast<std::size_t>(g.count)});
        total += g.count;
    }
    if (config.declared_total)
        require(*config.declared_total == total,
                "declared total " + std::to_string(*config.declared_total) +
                    " does not match sum of group counts " + std::to_string(total));
    return Portfolio(config.categories, std::move(groups));
}

}  // namespace cyber
