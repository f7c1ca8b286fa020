#pragma once

#include "error.hpp"
#include "flo.hpp"
#include "flow_field.hpp"
#include "frame.hpp"
#include "image_io.hpp"
#include "matrix.hpp"
#include "optical_flow.hpp"
#include "pooling.hpp"
