#include <stdio.h>
#include <stdlib.h>

#include "satshare.h"

static char *slurp(const char *path) {
  FILE *f = fopen(path, "rb");
  if (!f) return NULL;
  fseek(f, 0, SEEK_END);
  long n = ftell(f);
  fseek(f, 0, SEEK_SET);
  char *buf = malloc(n + 1);
  if (fread(buf, 1, n, f) != (size_t)n) {
    fclose(f);
    free(buf);
    return NULL;
  }
  buf[n] = '\0';
  fclose(f);
  return buf;
}

int main(int argc, char **argv) {
  if (argc < 2) return 2;
  char *text = slurp(argv[1]);
  if (!text) return 2;

  SatshareScenario *scenario = NULL;
  if (satshare_scenario_from_toml(text, &scenario) != SATSHARE_STATUS_OK) {
    fprintf(stderr, "%s\n", satshare_last_error());
    return 1;
  }
  free(text);

  SatsharePricing pricing;
  if (satshare_optimal_price(scenario, &pricing) != SATSHARE_STATUS_OK) return 1;

  SatshareReport *report = NULL;
  if (satshare_run_scenario(scenario, &report) != SATSHARE_STATUS_OK) {
    fprintf(stderr, "%s\n", satshare_last_error());
    return 1;
  }
  uint64_t height = 0;
  char *hash = NULL;
  satshare_report_chain_height(report, &height);
  satshare_report_trace_hash(report, &hash);
  printf("pi* %.6f height %llu trace %s\n", pricing.pi_star, (unsigned long long)height, hash);

  char *dump = NULL;
  int64_t bad = 0;
  satshare_report_chain_dump(report, &dump);
  SatshareStatus st = satshare_audit_chain_dump(dump, scenario, &bad);

  satshare_string_free(dump);
  satshare_string_free(hash);
  satshare_report_free(report);
  satshare_scenario_free(scenario);
  return st == SATSHARE_STATUS_OK && bad == -1 ? 0 : 1;
}
