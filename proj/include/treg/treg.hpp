#pragma once

// Convenience umbrella for the whole library.

#include "treg/admm.hpp"
#include "treg/config.hpp"
#include "treg/errors.hpp"
#include "treg/fft_solver.hpp"
#include "treg/grid_ops.hpp"
#include "treg/image.hpp"
#include "treg/io.hpp"
#include "treg/phantom.hpp"
#include "treg/pipeline.hpp"
#include "treg/potentials.hpp"
#include "treg/prox.hpp"
#include "treg/rootfind.hpp"
#include "treg/signal1d.hpp"
