import { execFile } from "node:child_process";

/** An engine invocation failed; carries the exit code and its stderr. */
export class EngineError extends Error {
  constructor(
    message: string,
    public readonly exitCode: number,
    public readonly stderr: string,
  ) {
    super(message);
    this.name = "EngineError";
  }
}

export interface EngineResult {
  stdout: string;
  stderr: string;
  exitCode: number;
}

/** Engine command; override with AKISTAGE_BIN (e.g. "python3 -m akistage"). */
export function engineCommand(): string[] {
  const bin = process.env.AKISTAGE_BIN ?? "akistage";
  return bin.split(" ");
}

export function runEngine(
  args: string[],
  okCodes: readonly number[] = [0],
): Promise<EngineResult> {
  const [command, ...prefix] = engineCommand();
  return new Promise((resolve, reject) => {
    execFile(
      command,
      [...prefix, ...args],
      { maxBuffer: 64 * 1024 * 1024 },
      (error, stdout, stderr) => {
        const exitCode =
          error && typeof (error as NodeJS.ErrnoException & { code?: unknown }).code === "number"
            ? ((error as unknown as { code: number }).code)
            : error
              ? 1
              : 0;
        if (error && !okCodes.includes(exitCode)) {
          const detail = stderr.trim().split("\n").pop() ?? "";
          reject(new EngineError(`engine exited with code ${exitCode}: ${detail}`, exitCode, stderr));
          return;
        }
        resolve({ stdout, stderr, exitCode });
      },
    );
  });
}
