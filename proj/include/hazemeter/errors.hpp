#pragma once

#include <stdexcept>
#include <string>

namespace haze {

// Base class for all domain errors raised by the library. CLI maps these to
// exit code 1; anything else is a usage or internal failure.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define HAZE_DEFINE_ERROR(name)                                               \
    struct name : Error {                                                     \
        explicit name(const std::string& what) : Error(#name ": " + what) {}  \
    }

HAZE_DEFINE_ERROR(NonDivisiblePatch);
HAZE_DEFINE_ERROR(OutOfBounds);
HAZE_DEFINE_ERROR(NonFiniteValue);
HAZE_DEFINE_ERROR(InvalidShutter);
HAZE_DEFINE_ERROR(InvalidCurve);
HAZE_DEFINE_ERROR(DegenerateConfiguration);
HAZE_DEFINE_ERROR(InvalidAsymmetry);
HAZE_DEFINE_ERROR(InvalidUnitVector);
HAZE_DEFINE_ERROR(ZeroSkyIrradiance);
HAZE_DEFINE_ERROR(DegenerateDOP);
HAZE_DEFINE_ERROR(InvalidAirlight);
HAZE_DEFINE_ERROR(DegenerateScene);
HAZE_DEFINE_ERROR(DegeneratePoint);
HAZE_DEFINE_ERROR(CollinearSamples);
HAZE_DEFINE_ERROR(NoAnchorFound);
HAZE_DEFINE_ERROR(AllOpaque);
HAZE_DEFINE_ERROR(LengthMismatch);
HAZE_DEFINE_ERROR(ShapeMismatch);
HAZE_DEFINE_ERROR(DegenerateSample);
HAZE_DEFINE_ERROR(ZeroNearDepth);
HAZE_DEFINE_ERROR(ZeroForeground);
HAZE_DEFINE_ERROR(IoError);

#undef HAZE_DEFINE_ERROR

}  // namespace haze
