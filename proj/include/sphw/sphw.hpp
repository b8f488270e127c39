#pragma once

#include "sphw/cli.hpp"
#include "sphw/config.hpp"
#include "sphw/convergence.hpp"
#include "sphw/droplet.hpp"
#include "sphw/eos.hpp"
#include "sphw/errors.hpp"
#include "sphw/forces.hpp"
#include "sphw/init.hpp"
#include "sphw/integrator.hpp"
#include "sphw/io.hpp"
#include "sphw/kernels.hpp"
#include "sphw/neighbors.hpp"
#include "sphw/parallel.hpp"
#include "sphw/particles.hpp"
#include "sphw/riemann.hpp"
#include "sphw/shocktube.hpp"
#include "sphw/transport.hpp"
#include "sphw/vec.hpp"
