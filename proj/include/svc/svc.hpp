#ifndef SVC_SVC_HPP
#define SVC_SVC_HPP

// Contour-based IP-frame codec for semantic segmentation maps, with a
// rate-distortion harness and packet framing for networked delivery.

#include "svc/bytes.hpp"
#include "svc/codec.hpp"
#include "svc/contour.hpp"
#include "svc/core.hpp"
#include "svc/frame_coder.hpp"
#include "svc/framing.hpp"
#include "svc/io.hpp"
#include "svc/metrics.hpp"
#include "svc/rangecoder.hpp"
#include "svc/simplify.hpp"
#include "svc/synthetic.hpp"

#endif  // SVC_SVC_HPP
