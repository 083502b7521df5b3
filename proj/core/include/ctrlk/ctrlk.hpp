#pragma once

#include "ctrlk/chains.hpp"
#include "ctrlk/control.hpp"
#include "ctrlk/error.hpp"
#include "ctrlk/geometric.hpp"
#include "ctrlk/ksimplex.hpp"
#include "ctrlk/modules.hpp"
#include "ctrlk/posets.hpp"
#include "ctrlk/report.hpp"
#include "ctrlk/rings.hpp"
