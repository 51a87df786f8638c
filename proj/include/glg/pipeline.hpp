#ifndef GLG_PIPELINE_HPP
#define GLG_PIPELINE_HPP

#include "glg/annotate.hpp"
#include "glg/guidance.hpp"
#include "glg/laser_detect.hpp"
#include "glg/line_detect.hpp"

namespace glg {

struct PipelineParams {
    DetectParams detect;
    LaserParams laser;
    AnnotateStyle style;
};

/// Full per-frame pipeline: Algorithm 1, Algorithm 2, then the guidance
/// construction. Absence at any stage is encoded in the result status.
inline GuidanceResult process_frame(const Image& rgb, const PipelineParams& p) {
    LineSelection sel = detect_lines(rgb, p.detect);
    std::optional<LaserSpot> spot = detect_laser(rgb, p.laser);
    return construct_guidance(sel, spot, rgb.width, rgb.height);
}

} // namespace glg

#endif // GLG_PIPELINE_HPP
