/* Minimal end-to-end use of the zeta-blocks C API: decompose a word,
 * build a certificate, verify it, and print the JSON record.
 *
 * Build (from the repository root, after `cargo build -p zeta-blocks-capi`):
 *   cc crates/capi/examples/smoke.c \
 *      -Icrates/capi/include \
 *      target/debug/libzeta_blocks_capi.a \
 *      -lpthread -ldl -lm -o smoke
 */

#include "zeta_blocks.h"

#include <stdio.h>
#include <string.h>

static int expect(ZbStatus status, const char *what) {
  if (status != ZB_STATUS_OK) {
    fprintf(stderr, "%s: %s (%s)\n", what, zb_status_message(status),
            zb_last_error_message());
    return 1;
  }
  return 0;
}

int main(void) {
  size_t count = 0;
  uint32_t lengths[8];
  ZbStatus status;

  /* sizing call, then the real one */
  status = zb_word_blocks("01100101010010101", NULL, 0, &count);
  if (status != ZB_STATUS_BUFFER_TOO_SMALL || count != 4) {
    fprintf(stderr, "unexpected sizing result\n");
    return 1;
  }
  status = zb_word_blocks("01100101010010101", lengths, count, &count);
  if (expect(status, "zb_word_blocks"))
    return 1;
  printf("blocks:");
  for (size_t i = 0; i < count; i++)
    printf(" %u", lengths[i]);
  printf("\n");

  ZbCertificate *cert = NULL;
  const uint32_t blocks[] = {2, 2, 2};
  status = zb_certificate_build(blocks, 3, &cert);
  if (expect(status, "zb_certificate_build"))
    return 1;

  /* 0 = library default for each numeric knob; NULL = default tolerance */
  status = zb_certificate_verify(cert, 128, 64, 10000, NULL);
  if (expect(status, "zb_certificate_verify")) {
    zb_certificate_free(cert);
    return 1;
  }

  bool passed = false;
  status = zb_certificate_passed(cert, &passed);
  if (expect(status, "zb_certificate_passed")) {
    zb_certificate_free(cert);
    return 1;
  }

  char *json = NULL;
  status = zb_certificate_json(cert, &json);
  if (expect(status, "zb_certificate_json")) {
    zb_certificate_free(cert);
    return 1;
  }
  printf("%s\n", json);
  printf("verdict: %s\n", passed ? "PASS" : "FAIL");

  zb_string_free(json);
  zb_certificate_free(cert);
  return passed ? 0 : 1;
}
