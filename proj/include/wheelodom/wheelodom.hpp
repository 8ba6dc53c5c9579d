#pragma once

// Wheel-odometry toolkit: quadrature decoding, framed encoder ingestion,
// differential-drive dead reckoning, trajectory metrics, wheel-geometry
// calibration by grid search, frame transforms, and a trajectory simulator
// that doubles as a verification oracle.

#include "wheelodom/calibration.hpp"
#include "wheelodom/circle_fit.hpp"
#include "wheelodom/crc16.hpp"
#include "wheelodom/errors.hpp"
#include "wheelodom/io.hpp"
#include "wheelodom/odometry.hpp"
#include "wheelodom/protocol.hpp"
#include "wheelodom/quadrature.hpp"
#include "wheelodom/simulator.hpp"
#include "wheelodom/transform.hpp"
#include "wheelodom/types.hpp"
