#pragma once

#include <atomic>
#include <csignal>

namespace shoplift::tools {

inline std::atomic<bool> g_stop{false};

inline void install_stop_handlers() {
  auto handler = [](int) { g_stop = true; };
  std::signal(SIGINT, handler);
  std::signal(SIGTERM, handler);
#ifdef SIGPIPE
  std::signal(SIGPIPE, SIG_IGN);
#endif
}

}  // namespace shoplift::tools
