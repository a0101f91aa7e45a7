#pragma once

#include <stdexcept>
#include <string>

namespace naba {

#define NABA_ERROR(NAME)                                   \
    struct NAME : std::runtime_error {                     \
        explicit NAME(const std::string& what)             \
            : std::runtime_error(#NAME ": " + what) {}     \
    }

NABA_ERROR(UnsupportedType);
NABA_ERROR(RankTooSmall);
NABA_ERROR(NotEndNode);
NABA_ERROR(AlgebraMismatch);
NABA_ERROR(NonIntegralSpectrum);
NABA_ERROR(NestingMismatch);
NABA_ERROR(SingularPoint);
NABA_ERROR(NotFusionPoint);
NABA_ERROR(ConventionSearchFailed);
NABA_ERROR(NotEigenvector);
NABA_ERROR(ConjectureFailed);
NABA_ERROR(NestingNotRankOneReducible);
NABA_ERROR(NoConvergence);
NABA_ERROR(DimensionTooLarge);
NABA_ERROR(PoleCollision);
NABA_ERROR(Mismatch);

#undef NABA_ERROR

// Carries the failing block and spectral point of a block Gauss pivot.
struct SingularDBlock : std::runtime_error {
    SingularDBlock(int i, int j, const std::string& at)
        : std::runtime_error("SingularDBlock: D^{" + std::to_string(i) + "," + std::to_string(j) +
                             "} not invertible at u = " + at),
          I(i), J(j), u(at) {}
    int I, J;
    std::string u;
};

}  // namespace naba
