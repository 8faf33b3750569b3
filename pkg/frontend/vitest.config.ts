import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
    // page origin matches the integration test's backend address so the
    // DOM fetch implementation treats API calls as same-origin
    environmentOptions: {
      happyDOM: { url: "http://127.0.0.1:21873" },
    },
    include: ["tests/**/*.test.ts"],
    testTimeout: 30_000,
    hookTimeout: 30_000,
  },
});
