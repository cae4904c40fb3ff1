/* Benchmark kernels for the timing analyzer. Arguments arrive in $a0..$a3. */

#define TIMING_POINT(name) __asm__ volatile(".globl " #name "\n" #name ":")

int straight(int a, int b)
{
    int s = a + b;
    int d = a - b;
    return (s ^ d) + (s << 2);
}

__attribute__((optnone, noinline)) int iabs(int x)
{
    if (x < 0)
        x = -x;
    return x;
}

int imin(int a, int b)
{
    if (a < b)
        return a;
    return b;
}

int imax(int a, int b)
{
    if (a > b)
        return a;
    return b;
}

/* Four input classes, each running a different constant number of rounds. */
int classify4(unsigned x)
{
    int rounds;
    if (x < 4096)
        rounds = 1;
    else if (x < 16384)
        rounds = 3;
    else if (x < 40000)
        rounds = 7;
    else
        rounds = 2;

    int acc = 0;
    for (int i = 0; i < rounds; i++)
        acc = (acc << 1) ^ ((int)x + i);
    return acc;
}

int nested(int n, int m)
{
    int s = 0;
    for (int i = 0; i < n; i++)
        for (int j = 0; j < i + m; j++)
            s ^= j + i;
    return s;
}

int isort4(int a, int b, int c, int d)
{
    int v[4];
    v[0] = a & 3;
    v[1] = b & 3;
    v[2] = c & 3;
    v[3] = d & 3;
    for (int i = 1; i < 4; i++) {
        int key = v[i];
        int j = i - 1;
        while (j >= 0 && v[j] > key) {
            v[j + 1] = v[j];
            j--;
        }
        v[j + 1] = key;
    }
    return (v[0] << 6) | (v[1] << 4) | (v[2] << 2) | v[3];
}

int satadd(int a, int b)
{
    int s = a + b;
    if (s > 100)
        s = 100;
    else if (s < -100)
        s = -100;
    return s;
}

int popcount(unsigned x)
{
    int c = 0;
    while (x != 0) {
        c += x & 1;
        x >>= 1;
    }
    return c;
}

int scale(int a, int b)
{
    return (a * b) / ((b & 7) + 1);
}

static const int table[8] = { 3, 9, 1, 7, 4, 12, 0, 6 };

int lookup(int x)
{
    int v = table[x & 7];
    if (v > 5)
        v = v * 2 + 1;
    return v;
}

__attribute__((noinline)) int helper(int x)
{
    if (x & 1)
        return x * 3 + 1;
    return x >> 1;
}

int caller(int a)
{
    return helper(a) + helper(a + 1);
}

int tp_region(int x)
{
    int s = 0;
    TIMING_POINT(tp_a);
    for (int i = 0; i < (x & 7); i++)
        s = (s << 1) ^ i;
    TIMING_POINT(tp_b);
    return s;
}

int main(void)
{
    return caller(3) + iabs(-2);
}
