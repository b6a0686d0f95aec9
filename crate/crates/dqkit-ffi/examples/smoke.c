#include <stdio.h>
#include <string.h>
#include "dqkit.h"

int main(void) {
    char buf[256];
    size_t needed = 0;
    DqPoly *q = NULL, *p = NULL;
    if (dq_poly_parse("q", &q) != DQ_OK || dq_poly_parse("p", &p) != DQ_OK) return 10;
    if (dq_poly_star(q, p, buf, sizeof buf, &needed) != DQ_OK) return 11;
    printf("%s\n", buf);
    if (strcmp(buf, "q*p - (i/2)*hbar") != 0) return 12;
    if (dq_normalize("d*a", buf, sizeof buf, &needed) != DQ_OK) return 13;
    printf("%s\n", buf);
    DqPoly *bad = NULL;
    if (dq_poly_parse("q + x", &bad) != DQ_ERR_PARSE || bad != NULL) return 14;
    dq_last_error(buf, sizeof buf);
    printf("%s\n", buf);
    dq_poly_free(q);
    dq_poly_free(p);
    return 0;
}
