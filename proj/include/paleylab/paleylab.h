#ifndef PALEYLAB_H
#define PALEYLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PALEYLAB_API __declspec(dllexport)
#else
#define PALEYLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Return codes. Commands use the same values as the CLI exit status. */
enum {
  PALEYLAB_OK = 0,
  PALEYLAB_VIOLATION = 1, /* a check ran and failed */
  PALEYLAB_INVALID = 2,   /* bad input or hypothesis violation */
  PALEYLAB_INTERNAL = 3
};

typedef struct paleylab_session paleylab_session;

PALEYLAB_API const char* paleylab_version(void);

PALEYLAB_API paleylab_session* paleylab_session_new(void);
PALEYLAB_API void paleylab_session_free(paleylab_session* s);

/* 0 means PALEY_LAB_WORKERS or the hardware thread count. */
PALEYLAB_API int paleylab_set_workers(paleylab_session* s, size_t workers);

/* Runs one CLI command; argv excludes the program name. */
PALEYLAB_API int paleylab_run(paleylab_session* s, int argc, const char* const* argv);

/* Output and error text of the last call. Owned by the session and valid
   until the next call on it. Never NULL for a live session. */
PALEYLAB_API const char* paleylab_output(const paleylab_session* s);
PALEYLAB_API const char* paleylab_last_error(const paleylab_session* s);

/* Members of S(e) for integer e (the circle). If out is NULL or cap is too
   small only *count is set; the call still returns PALEYLAB_OK. */
PALEYLAB_API int paleylab_s_set(paleylab_session* s, const int64_t* e, size_t n, int64_t* out, size_t cap,
                                size_t* count);

/* Coefficient of the Riesz product prod (1 + cos(k t)) at g. */
PALEYLAB_API int paleylab_riesz_coefficient(paleylab_session* s, const int64_t* k, size_t n, int64_t g,
                                            double* value);

/* ||f^|K||_2 / ||f||_1 for samples f on an equispaced circle grid of size
   len; spectral window half-width is (len - 1) / 2 rounded down. */
PALEYLAB_API int paleylab_check_ratio(paleylab_session* s, const double* re, const double* im, size_t len,
                                      const int64_t* k, size_t n, double* ratio);

#ifdef __cplusplus
}
#endif

#endif
