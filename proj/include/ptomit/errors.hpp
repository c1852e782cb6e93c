#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ptomit
{

// Bad input: malformed config, out-of-range parameter, invalid grid.
// The CLI maps these to exit code 2.
class ConfigError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// The physics at the requested point is unusable (instability, pole,
// infeasible steady state, ...). The CLI maps these to exit code 1.
class PhysicsError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class SingularityError : public PhysicsError
{
public:
    using PhysicsError::PhysicsError;
};

// f₁ or f₂ in the probe susceptibility vanished; which() is "f1" or "f2".
class SusceptibilityPoleError : public SingularityError
{
public:
    SusceptibilityPoleError(const std::string& what, std::string which)
        : SingularityError(what), which_(std::move(which))
    {
    }
    const std::string& which() const { return which_; }

private:
    std::string which_;
};

class InfeasibleError : public PhysicsError
{
public:
    using PhysicsError::PhysicsError;
};

class PoleError : public PhysicsError
{
public:
    PoleError(const std::string& what, double omega) : PhysicsError(what), omega_(omega) {}
    double omega() const { return omega_; }

private:
    double omega_;
};

class StencilError : public PhysicsError
{
public:
    using PhysicsError::PhysicsError;
};

class UnstableError : public PhysicsError
{
public:
    UnstableError(const std::string& what, double margin) : PhysicsError(what), margin_(margin) {}
    double margin() const { return margin_; }

private:
    double margin_;
};

class NumericalError : public PhysicsError
{
public:
    using PhysicsError::PhysicsError;
};

class SelectionError : public PhysicsError
{
public:
    using PhysicsError::PhysicsError;
};

class BracketError : public PhysicsError
{
public:
    using PhysicsError::PhysicsError;
};

class BoundaryError : public PhysicsError
{
public:
    using PhysicsError::PhysicsError;
};

class BandwidthUndefinedError : public PhysicsError
{
public:
    using PhysicsError::PhysicsError;
};

class InconclusiveError : public PhysicsError
{
public:
    InconclusiveError(const std::string& what, double decay) : PhysicsError(what), decay_(decay) {}
    double decay_metric() const { return decay_; }

private:
    double decay_;
};

} // namespace ptomit
