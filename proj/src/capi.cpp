#include "paleylab/paleylab.h"

#include <string>
#include <vector>

#include "paleylab/combinatorics.hpp"
#include "paleylab/commands.hpp"
#include "paleylab/error.hpp"
#include "paleylab/inequality_lab.hpp"
#include "paleylab/riesz.hpp"

struct paleylab_session {
  std::size_t workers = 0;
  std::string out, error;
};

namespace {

// runs fn, turning exceptions into codes and the session's error text
template <class Fn>
int guarded(paleylab_session* s, Fn&& fn) {
  if (!s) return PALEYLAB_INVALID;
  s->out.clear();
  s->error.clear();
  try {
    return fn();
  } catch (const paleylab::InvalidInput& e) {
    s->error = e.what();
    return PALEYLAB_INVALID;
  } catch (const std::exception& e) {
    s->error = std::string("internal error: ") + e.what();
    return PALEYLAB_INTERNAL;
  } catch (...) {
    s->error = "internal error";
    return PALEYLAB_INTERNAL;
  }
}

std::vector<std::int64_t> ints(const int64_t* p, size_t n) {
  if (!p && n) throw paleylab::InvalidInput("null frequency array");
  return {p, p + n};
}

}  // namespace

extern "C" {

const char* paleylab_version(void) { return "0.1.0"; }

paleylab_session* paleylab_session_new(void) {
  try {
    return new paleylab_session;
  } catch (...) {
    return nullptr;
  }
}

void paleylab_session_free(paleylab_session* s) { delete s; }

int paleylab_set_workers(paleylab_session* s, size_t workers) {
  if (!s) return PALEYLAB_INVALID;
  s->workers = workers;
  return PALEYLAB_OK;
}

int paleylab_run(paleylab_session* s, int argc, const char* const* argv) {
  return guarded(s, [&] {
    if (argc < 0 || (argc > 0 && !argv)) throw paleylab::InvalidInput("bad argv");
    std::vector<std::string> args;
    for (int i = 0; i < argc; ++i) {
      if (!argv[i]) throw paleylab::InvalidInput("null argument");
      args.emplace_back(argv[i]);
    }
    auto r = paleylab::run_command(args, s->workers);
    s->out = std::move(r.out);
    s->error = std::move(r.error);
    return r.code;
  });
}

const char* paleylab_output(const paleylab_session* s) { return s ? s->out.c_str() : ""; }
const char* paleylab_last_error(const paleylab_session* s) { return s ? s->error.c_str() : "null session"; }

int paleylab_s_set(paleylab_session* s, const int64_t* e, size_t n, int64_t* out, size_t cap, size_t* count) {
  return guarded(s, [&] {
    if (!count) throw paleylab::InvalidInput("null count");
    auto rep = paleylab::s_set(ints(e, n));
    *count = rep.members.size();
    if (out && cap >= rep.members.size())
      for (std::size_t i = 0; i < rep.members.size(); ++i) out[i] = rep.members[i];
    return PALEYLAB_OK;
  });
}

int paleylab_riesz_coefficient(paleylab_session* s, const int64_t* k, size_t n, int64_t g, double* value) {
  return guarded(s, [&] {
    if (!value) throw paleylab::InvalidInput("null value");
    auto K = paleylab::to_freqs(ints(k, n));
    *value = paleylab::riesz_expansion(K).value(g);
    return PALEYLAB_OK;
  });
}

int paleylab_check_ratio(paleylab_session* s, const double* re, const double* im, size_t len, const int64_t* k,
                         size_t n, double* ratio) {
  return guarded(s, [&] {
    if (!re || !im || !ratio) throw paleylab::InvalidInput("null buffer");
    if (len < 2) throw paleylab::InvalidInput("need at least two samples");
    auto spec = paleylab::GridSpec::circle(len, static_cast<std::int64_t>((len - 1) / 2));
    auto f = paleylab::GridFunction::zeros(spec);
    for (std::size_t i = 0; i < len; ++i) f.samples[i] = {re[i], im[i]};
    *ratio = paleylab::check_ratio(f, paleylab::to_freqs(ints(k, n)));
    return PALEYLAB_OK;
  });
}

}  // extern "C"
