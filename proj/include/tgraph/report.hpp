#ifndef TGRAPH_REPORT_HPP
#define TGRAPH_REPORT_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace tgraph
{

/// One named verification step.
struct Check
{
    std::string name;
    bool passed = true;
    double residual = 0.0;
    std::string detail;
};

/// Ordered list of checks.
struct CheckList
{
    std::vector<Check> checks;

    Check& add(std::string name, bool passed, double residual = 0.0, std::string detail = {})
    {
        checks.push_back({std::move(name), passed, residual, std::move(detail)});
        return checks.back();
    }

    /// Residual check: passes iff residual <= tol (NaN fails).
    Check& add_residual(std::string name, double residual, double tol, std::string detail = {})
    {
        return add(std::move(name), residual <= tol, residual, std::move(detail));
    }

    void append(const CheckList& o, const std::string& prefix = {})
    {
        for(const auto& c : o.checks) checks.push_back({prefix + c.name, c.passed, c.residual, c.detail});
    }

    bool passed() const
    {
        for(const auto& c : checks)
            if(!c.passed) return false;
        return true;
    }

    const Check* first_failure() const
    {
        for(const auto& c : checks)
            if(!c.passed) return &c;
        return nullptr;
    }

    double max_residual() const
    {
        double m = 0.0;
        for(const auto& c : checks) m = c.residual > m ? c.residual : m;
        return m;
    }
};

/// 64-bit FNV-1a, used for input digests.
inline std::uint64_t fnv1a(const std::string& data, std::uint64_t h = 14695981039346656037ull)
{
    for(unsigned char ch : data)
    {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace tgraph

#endif
