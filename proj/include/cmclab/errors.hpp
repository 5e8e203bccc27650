#pragma once

#include <stdexcept>
#include <string>

namespace cmc {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define CMC_DEFINE_ERROR(Name)                                   \
  struct Name : Error {                                          \
    explicit Name(const std::string& msg) : Error(#Name ": " + msg) {} \
  }

CMC_DEFINE_ERROR(NotALattice);
CMC_DEFINE_ERROR(DoesNotContain2PiZ2);
CMC_DEFINE_ERROR(SymmetryActionUndefined);
CMC_DEFINE_ERROR(ParamOutOfRange);
CMC_DEFINE_ERROR(GridTooCoarse);
CMC_DEFINE_ERROR(IntegratorDivergence);
CMC_DEFINE_ERROR(SolverSingular);
CMC_DEFINE_ERROR(InadmissibleLattice);
CMC_DEFINE_ERROR(TruncationTooSmall);
CMC_DEFINE_ERROR(FitUnstable);
CMC_DEFINE_ERROR(SingularitySampled);
CMC_DEFINE_ERROR(NoSolution);
CMC_DEFINE_ERROR(OutsideAnnulus);
CMC_DEFINE_ERROR(StitchMismatch);
CMC_DEFINE_ERROR(ResolutionTooCoarse);
CMC_DEFINE_ERROR(NotWatertight);
CMC_DEFINE_ERROR(GraphOutOfChart);
CMC_DEFINE_ERROR(DegenerateTangent);
CMC_DEFINE_ERROR(UnboundedConstant);
CMC_DEFINE_ERROR(BadMesh);
CMC_DEFINE_ERROR(EigensolverNoConvergence);
CMC_DEFINE_ERROR(SingularSystem);
CMC_DEFINE_ERROR(ContractionFailure);
CMC_DEFINE_ERROR(SelfIntersectionSuspected);
CMC_DEFINE_ERROR(MaxIterations);
CMC_DEFINE_ERROR(RadiusExceeded);
CMC_DEFINE_ERROR(LinearSolveFailure);
CMC_DEFINE_ERROR(ConfigError);

#undef CMC_DEFINE_ERROR

}  // namespace cmc
