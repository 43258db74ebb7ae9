#pragma once

#include "ricci/curvature.hpp"
#include "ricci/error.hpp"
#include "ricci/export.hpp"
#include "ricci/flow.hpp"
#include "ricci/graph.hpp"
#include "ricci/graph_io.hpp"
#include "ricci/jacobi.hpp"
#include "ricci/report.hpp"
#include "ricci/reproduce.hpp"
#include "ricci/simplex.hpp"
#include "ricci/spectral.hpp"
