#ifndef CRISP_TOOLS_COMMANDS_HPP
#define CRISP_TOOLS_COMMANDS_HPP

#include "kvconfig.hpp"

namespace crisp::tools {

KvConfig synth_keys();
KvConfig refine_keys();
KvConfig pick_keys();
KvConfig tune_keys();
KvConfig eval_keys();
KvConfig fsc_keys();

void run_synth(const KvConfig& cfg);
void run_refine(const KvConfig& cfg);
void run_pick(const KvConfig& cfg);
void run_tune(const KvConfig& cfg);
void run_eval(const KvConfig& cfg);
void run_fsc(const KvConfig& cfg);

}  // namespace crisp::tools

#endif
