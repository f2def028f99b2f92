#ifndef MMTRAIN_MMTRAIN_HPP
#define MMTRAIN_MMTRAIN_HPP

#include "mmtrain/errors.hpp"
#include "mmtrain/units.hpp"
#include "mmtrain/link_model.hpp"
#include "mmtrain/coalition.hpp"
#include "mmtrain/scheduler.hpp"
#include "mmtrain/scenario.hpp"
#include "mmtrain/config_file.hpp"
#include "mmtrain/experiment.hpp"

#endif  // MMTRAIN_MMTRAIN_HPP
