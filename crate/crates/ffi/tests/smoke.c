#include <stdio.h>
#include "eginv.h"

int main(int argc, char **argv) {
    if (argc < 2) return 2;
    EgDataSet *ds = NULL;
    if (eg_dataset_from_file(argv[1], &ds) != EG_STATUS_OK) {
        fprintf(stderr, "%s\n", eg_last_error());
        return 1;
    }
    EgElement *g = NULL;
    double inc[4];
    EgStatus s = eg_solve(ds, EG_METHOD_AUTO, 0.0, &g, inc);
    if (s != EG_STATUS_OK) {
        fprintf(stderr, "%s\n", eg_last_error());
        eg_dataset_free(ds);
        return 1;
    }
    double re, im;
    eg_element_entry(g, 0, 0, 1, &re, &im);
    printf("%.3f\n", re);
    eg_element_free(g);
    eg_dataset_free(ds);
    return 0;
}
