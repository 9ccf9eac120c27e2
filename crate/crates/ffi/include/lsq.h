#ifndef LSQ_H
#define LSQ_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call.
 */
typedef enum LsqStatus {
  LSQ_STATUS_OK = 0,
  LSQ_STATUS_NULL_POINTER = 1,
  LSQ_STATUS_INVALID_ARGUMENT = 2,
  LSQ_STATUS_NOT_LATIN = 3,
  LSQ_STATUS_BAD_MAGIC = 4,
  LSQ_STATUS_BAD_CHECKSUM = 5,
  LSQ_STATUS_TRUNCATED = 6,
  LSQ_STATUS_MALFORMED_CONTAINER = 7,
  LSQ_STATUS_ORDER_MISMATCH = 8,
  LSQ_STATUS_SYMBOL_OUT_OF_RANGE = 9,
  LSQ_STATUS_NONCE_REUSE = 10,
  LSQ_STATUS_KEYSTREAM_EXHAUSTED = 11,
  /**
   * Decryption finished but the plaintext checksum disagrees: wrong key,
   * wrong engine or damaged payload.
   */
  LSQ_STATUS_CHECKSUM_MISMATCH = 12,
  LSQ_STATUS_PANIC = 255,
} LsqStatus;

/**
 * Which of the two equivalent encryption forms a session runs.
 */
typedef enum LsqEngine {
  LSQ_ENGINE_AUTOMATON = 0,
  LSQ_ENGINE_QUASIGROUP = 1,
} LsqEngine;

/**
 * Opaque key handle: transition table plus keystream seed.
 */
typedef struct LsqKey LsqKey;

/**
 * Opaque session handle bound to one key and one nonce.
 */
typedef struct LsqSession LsqSession;

/**
 * A library-allocated byte buffer.
 */
typedef struct LsqBytes {
  uint8_t *data;
  size_t len;
} LsqBytes;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread, or NULL.
 *
 * The pointer stays valid until the next `lsq_*` call on the same thread.
 */
const char *lsq_last_error_message(void);

/**
 * Static, NUL-terminated name of a status code.
 */
const char *lsq_status_name(enum LsqStatus status);

/**
 * Generates a key of the given order.
 *
 * The table is derived from `table_seed` (any length, may be empty) and
 * optionally mixed by `walk_steps` random-walk moves (order <= 256 only).
 * `stream_seed` must point at 32 bytes of secret randomness.
 */
enum LsqStatus lsq_key_generate(uint32_t order,
                                const uint8_t *table_seed,
                                size_t table_seed_len,
                                uint64_t walk_steps,
                                const uint8_t *stream_seed,
                                struct LsqKey **out);

/**
 * Parses a serialized key file.
 */
enum LsqStatus lsq_key_from_bytes(const uint8_t *data, size_t len, struct LsqKey **out);

/**
 * Serializes a key in the key file format.
 */
enum LsqStatus lsq_key_to_bytes(const struct LsqKey *key, struct LsqBytes *out);

/**
 * Alphabet size of the key, or 0 for a null handle.
 */
uint32_t lsq_key_order(const struct LsqKey *key);

void lsq_key_free(struct LsqKey *key);

/**
 * Opens a session for one message under `nonce` (12 bytes).
 *
 * The session keeps its own reference to the key, so the key handle may be
 * freed first. Never open two sessions with the same key and nonce for
 * different messages.
 */
enum LsqStatus lsq_session_new(const struct LsqKey *key,
                               const uint8_t *nonce,
                               uint32_t block_len,
                               enum LsqEngine engine,
                               struct LsqSession **out);

/**
 * Encrypts `len` symbols from `input_symbols` into `output_symbols`.
 *
 * Consumes keystream; successive calls continue the same message.
 */
enum LsqStatus lsq_session_encrypt(struct LsqSession *session,
                                   const uint16_t *input_symbols,
                                   uint16_t *output_symbols,
                                   size_t len);

/**
 * Inverse of [`lsq_session_encrypt`] for a session opened with the same
 * key, nonce, block length and engine.
 */
enum LsqStatus lsq_session_decrypt(struct LsqSession *session,
                                   const uint16_t *input_symbols,
                                   uint16_t *output_symbols,
                                   size_t len);

void lsq_session_free(struct LsqSession *session);

/**
 * Encrypts a byte string into a serialized container.
 */
enum LsqStatus lsq_seal(const struct LsqKey *key,
                        const uint8_t *nonce,
                        uint32_t block_len,
                        enum LsqEngine engine,
                        const uint8_t *plaintext,
                        size_t plaintext_len,
                        struct LsqBytes *out);

/**
 * Decrypts a serialized container.
 *
 * Returns `ChecksumMismatch` when the recovered plaintext fails its
 * checksum; `out` is still filled if the symbols decode to bytes.
 */
enum LsqStatus lsq_open(const struct LsqKey *key,
                        enum LsqEngine engine,
                        const uint8_t *container,
                        size_t container_len,
                        struct LsqBytes *out);

/**
 * Releases a buffer returned by the library. Passing an empty buffer is a
 * no-op.
 */
void lsq_bytes_free(struct LsqBytes bytes);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LSQ_H */
