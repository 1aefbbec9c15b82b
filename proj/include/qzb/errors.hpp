#pragma once

#include <stdexcept>
#include <string>

namespace qzb {

/// Base class for every failure raised by the simulator. The tag is a short
/// machine-readable identifier (e.g. `truncation_leak`) that the sweep engine
/// and the CLI print verbatim.
class SimulationError : public std::runtime_error
{
public:
    SimulationError(std::string tag, const std::string& what)
      : std::runtime_error(what), m_tag(std::move(tag))
    {
    }

    const std::string& tag() const noexcept { return m_tag; }

private:
    std::string m_tag;
};

/// Population reached the highest retained Fock level of a mode.
class TruncationLeak : public SimulationError
{
public:
    TruncationLeak(const std::string& what, bool signal, bool idler, double xi)
      : SimulationError("truncation_leak", what), m_signal(signal),
        m_idler(idler), m_xi(xi)
    {
    }

    bool signal_violated() const noexcept { return m_signal; }
    bool idler_violated() const noexcept { return m_idler; }
    /// Evolution coordinate at which the monitor tripped.
    double xi() const noexcept { return m_xi; }

private:
    bool m_signal;
    bool m_idler;
    double m_xi;
};

class NonPhysicalState : public SimulationError
{
public:
    explicit NonPhysicalState(const std::string& what)
      : SimulationError("non_physical_state", what)
    {
    }
};

class StepFailure : public SimulationError
{
public:
    explicit StepFailure(const std::string& what)
      : SimulationError("step_failure", what)
    {
    }
};

class CutoffCeiling : public SimulationError
{
public:
    explicit CutoffCeiling(const std::string& what)
      : SimulationError("cutoff_ceiling", what)
    {
    }
};

class DimensionGuard : public SimulationError
{
public:
    explicit DimensionGuard(const std::string& what)
      : SimulationError("dimension_guard", what)
    {
    }
};

/// Invalid user-facing configuration (bad JSON, inconsistent options).
class ConfigError : public SimulationError
{
public:
    explicit ConfigError(const std::string& what,
                         std::string tag = "config_parse")
      : SimulationError(std::move(tag), what)
    {
    }
};

} // namespace qzb
