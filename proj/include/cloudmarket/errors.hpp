#pragma once

#include <stdexcept>
#include <string>

namespace cloudmarket {

struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Kernel
struct UnknownEntityError : SimError {
    using SimError::SimError;
};
struct HorizonBeforeNowError : SimError {
    using SimError::SimError;
};

// Infrastructure
struct InfeasibleDestinationError : SimError {
    using SimError::SimError;
};

// Workload
struct EmptyDomainError : SimError {
    using SimError::SimError;
};
struct ZeroRateError : SimError {
    using SimError::SimError;
};

// Market / ledger
struct UnknownVmClassError : SimError {
    using SimError::SimError;
};
struct NegativeIntervalError : SimError {
    using SimError::SimError;
};
struct UnknownAccountError : SimError {
    using SimError::SimError;
};
struct NegativeAmountError : SimError {
    using SimError::SimError;
};
struct DoubleSettlementError : SimError {
    using SimError::SimError;
};

// Energy
struct InvalidSpeedError : SimError {
    using SimError::SimError;
};
struct InfeasibleDeadlineError : SimError {
    using SimError::SimError;
};

}  // namespace cloudmarket
