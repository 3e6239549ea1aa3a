using System;
using System.Collections.Generic;

namespace Fixtures.Complexity
{
    public class CcSuite
    {
        private int state;

        public CcSuite(int seed)
        {
            state = seed > 0 ? seed : 1;
        }

        public void Straight()
        {
            state = state + 1;
        }

        public int SingleIf(int a)
        {
            if (a > 0) { return a; }
            return -a;
        }

        public int ElseIfChain(int a)
        {
            if (a > 10) return 3;
            else if (a > 5) return 2;
            else if (a > 0) return 1;
            else return 0;
        }

        public int Loops(int[] xs)
        {
            int s = 0;
            for (int i = 0; i < xs.Length; i++) s += xs[i];
            foreach (var x in xs) s += x;
            while (s > 100) s /= 2;
            return s;
        }

        public bool Logical(int a, int b)
        {
            if (a > 0 && b > 0 || a < -5)
            {
                return true;
            }
            return a == b && b != 0;
        }

        public string Switch(int code)
        {
            switch (code)
            {
                case 1: return "one";
                case 2: return "two";
                case 3: return "three";
                default: return "many";
            }
        }

        public int Ternary(int a)
        {
            int b = a > 0 ? a : -a;
            return b > 10 ? 10 : b;
        }

        public int TryCatch(string s)
        {
            try { return int.Parse(s); }
            catch (FormatException) { return -1; }
            catch (OverflowException e) { Log(e.Message); return -2; }
            finally { state++; }
        }

        public int? Nullable(int? a)
        {
            int? b = a ?? 0;
            if (b == null) return null;
            return b?.GetHashCode();
        }

        public void KeywordsInText()
        {
            // if (x) while (y) for (;;)
            string s = "if (x) while (y) && ||";
            char c = '?';
            Log(s + c);
        }

        public int DoWhile(int n)
        {
            int k = 0;
            do { k++; } while (k < n && k < 100);
            return k;
        }

        public int Lambda(List<int> xs)
        {
            Func<int, int> f = x => x > 0 ? x : 0;
            xs.ForEach(x => { if (x > 2) state += f(x); });
            return state;
        }

        public int Nested(int[][] grid)
        {
            int n = 0;
            foreach (var row in grid)
            {
                for (int j = 0; j < row.Length; j++)
                {
                    if (row[j] > 0)
                    {
                        while (row[j] > 10 || n > 1000) { row[j] -= 10; n++; }
                    }
                }
            }
            return n;
        }

        public T Larger<T>(T a, T b) where T : IComparable<T>
        {
            return a.CompareTo(b) > 0 ? a : b;
        }

        public int PatternSwitch(object o)
        {
            switch (o)
            {
                case int i when i > 0 && i < 10: return 1;
                case string s: return 2;
                case null: return 3;
                default: return 0;
            }
        }

        public bool Tangled(int a, int b, int c)
        {
            if (a > b) { if (b > c) return true; }
            for (int i = 0; i < a; i++) { if (i == b || i == c) return false; }
            while (a > 0 && b > 0) { a--; b--; }
            return c > 0 ? a > c : b > c;
        }

        private void Log(string message)
        {
            Console.WriteLine(message);
        }
    }
}
