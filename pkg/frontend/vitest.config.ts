import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
    include: ["tests/**/*.test.ts"],
    testTimeout: 120_000,
    hookTimeout: 120_000,
    // Each live test file spawns its own service on its own port; run
    // files sequentially to keep the Python processes from piling up.
    fileParallelism: false,
  },
});
