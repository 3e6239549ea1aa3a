package fixtures.complexity;

import java.util.List;
import java.util.Map;

public class CcSuite {
    private int state;

    public CcSuite(int seed) {
        this.state = seed;
        if (seed < 0) { throw new IllegalArgumentException("negative"); }
    }

    public void straight() { state += 1; }

    public int enhancedFor(List<Integer> xs) {
        int s = 0;
        for (int x : xs) { if (x > 0) s += x; }
        return s;
    }

    public int wildcard(List<? extends Number> xs) {
        List<?> copy = xs;
        Map<String, ? super Integer> m = null;
        return copy.isEmpty() ? 0 : 1;
    }

    public String fallThrough(int d) {
        switch (d) {
            case 1: return "a";
            case 2:
            case 3: return "b";
            default: return "c";
        }
    }

    public void multiCatch(String s) {
        try {
            Integer.parseInt(s);
        } catch (NumberFormatException | NullPointerException e) {
            state = -1;
        } catch (RuntimeException e) {
        }
    }

    public boolean logic(boolean a, boolean b, boolean c) {
        while (a || b) { a = false; b = false; }
        if (a && b && c) return true;
        return a || c;
    }

    public int anonymous() {
        Runnable r = new Runnable() {
            public void run() { if (state > 0) state--; }
        };
        r.run();
        return state;
    }

    public int labeled(int[][] g) {
        int n = 0;
        outer:
        for (int[] row : g) {
            for (int v : row) {
                if (v < 0) break outer;
                n += v;
            }
        }
        return n;
    }

    public int ternaryChain(int a) {
        return a > 10 ? 2 : a > 5 ? 1 : a > 0 ? 0 : -1;
    }
}
