#pragma once

#include <stdexcept>
#include <string>

namespace spopo {

/// A physics-domain precondition failed (below-threshold input to an
/// above-threshold formula, unstable step size, ...).
class physics_error : public std::domain_error
{
public:
    explicit physics_error(const std::string& what) : std::domain_error(what) {}
};

/// Malformed or inconsistent run configuration. `path` names the offending
/// JSON location, e.g. "/simulation/pulses".
class config_error : public std::runtime_error
{
public:
    config_error(std::string path, const std::string& what)
        : std::runtime_error(path.empty() ? what : path + ": " + what),
          m_path(std::move(path))
    {
    }

    const std::string& path() const noexcept { return m_path; }

private:
    std::string m_path;
};

/// A measured spectrum disagreed with its prediction.
class comparison_failure : public std::runtime_error
{
public:
    explicit comparison_failure(const std::string& what) : std::runtime_error(what) {}
};

} // namespace spopo
