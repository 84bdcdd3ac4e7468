#pragma once

#include "srmlab/bounds.hpp"
#include "srmlab/common.hpp"
#include "srmlab/core.hpp"
#include "srmlab/covering.hpp"
#include "srmlab/harness.hpp"
#include "srmlab/io.hpp"
#include "srmlab/local_entropy.hpp"
#include "srmlab/srm.hpp"
